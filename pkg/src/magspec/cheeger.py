"""Cheeger ratios, exact multi-way constants, and certified sweep cuts.

The ratio of a vertex set mixes its frustration with its expansion:
phi(V1) = (iota(V1) + boundary(V1)) / vol(V1).  For ordered k-partitions the
same quantity appears as the k-partiteness ratio beta, whose minimum over
all labelings of a fixed base set equals phi with exact frustration.

Sweep cuts threshold an eigenfunction's modulus (and, for cyclic signatures,
its sector angle) and return the best candidate together with the
theoretical bound it is certified against; the candidate grid exhausts all
distinct partitions any threshold pair can produce, so the certified bound
always holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frustration import (
    CapExceededError,
    ENUMERATION_CAP,
    frustration_exact_cyclic,
    frustration_heuristic_u1,
)
from .graphs import SignedGraph, boundary_measure, max_mu_degree, volume
from .groups import chord_lengths
from .spectral import rayleigh

CERT_SLACK = 1e-9


class CertificateError(AssertionError):
    """A produced certificate failed its own postcondition."""


@dataclass(frozen=True)
class OrderedKPartition:
    """k ordered, pairwise-disjoint (possibly empty) parts covering the base set."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for part in self.parts:
            for u in part:
                if u in seen:
                    raise ValueError(f"vertex {u} appears in two parts")
                seen.add(u)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(sorted(u for part in self.parts for u in part))

    def labels(self) -> dict[int, int]:
        return {u: j for j, part in enumerate(self.parts) for u in part}


@dataclass(frozen=True)
class RatioResult:
    value: float
    exact: bool
    frustration: float
    boundary: float
    volume: float


@dataclass(frozen=True, eq=False)
class ClusterCertificate:
    """A candidate set or partition with its certified ratio bound."""

    candidate: tuple[int, ...] | OrderedKPartition
    ratio: float
    bound: float
    frustration_value: float
    frustration_exact: bool
    boundary: float
    volume: float
    t: float
    theta: float | None

    def validate(self) -> None:
        recomputed = (self.frustration_value + self.boundary) / self.volume
        if abs(recomputed - self.ratio) > 1e-10 * max(1.0, abs(self.ratio)):
            raise CertificateError(
                f"ratio {self.ratio} does not recompute ({recomputed})"
            )
        if self.ratio > self.bound + CERT_SLACK:
            raise CertificateError(f"ratio {self.ratio} exceeds bound {self.bound}")

    def vertex_set(self) -> tuple[int, ...]:
        if isinstance(self.candidate, OrderedKPartition):
            return self.candidate.base
        return self.candidate

    def to_json(self, names=None) -> dict:
        def nm(u):
            return names[u] if names is not None else u

        if isinstance(self.candidate, OrderedKPartition):
            cand = {
                "base": [nm(u) for u in self.candidate.base],
                "parts": [[nm(u) for u in part] for part in self.candidate.parts],
            }
        else:
            cand = {"set": [nm(u) for u in self.candidate]}
        return {
            "candidate": cand,
            "ratio": self.ratio,
            "bound": self.bound,
            "frustration": {"value": self.frustration_value, "exact": self.frustration_exact},
            "boundary": self.boundary,
            "volume": self.volume,
            "t": self.t,
            "theta": self.theta,
        }


def phi(
    g: SignedGraph,
    subset,
    mu: np.ndarray | None = None,
    mode: str = "exact",
    restarts: int = 8,
    seed: int = 0,
) -> RatioResult:
    """(frustration + boundary) / volume of a nonempty vertex set."""
    subset = sorted(set(int(u) for u in subset))
    if not subset:
        raise ValueError("phi of the empty set is not defined")
    if mode == "exact":
        fr = frustration_exact_cyclic(g, subset)
    elif mode == "heuristic":
        fr = frustration_heuristic_u1(g, subset, restarts=restarts, seed=seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bnd = boundary_measure(g, subset)
    vol = volume(g, subset, mu)
    return RatioResult((fr.value + bnd) / vol, fr.exact, fr.value, bnd, vol)


# ---------------------------------------------------------------------------
# Exact multi-way Cheeger constants (the enumeration oracle)
# ---------------------------------------------------------------------------


def all_subset_frustrations(g: SignedGraph) -> np.ndarray:
    """Exact cyclic frustration index for every vertex subset, indexed by bitmask.

    One vectorized pass over all (k+1)^N assignments vertex -> {out, 0..k-1};
    the minimum inside-mismatch per support mask is the frustration index.
    """
    if g.group_kind != "cyclic":
        raise ValueError("subset frustration table needs a cyclic signature")
    N, k = g.n, g.group_order
    total = (k + 1) ** N
    if total > ENUMERATION_CAP:
        raise CapExceededError(f"(k+1)^N = {total} exceeds cap {ENUMERATION_CAP}")
    chord = np.array(chord_lengths(k))
    iota = np.full(1 << N, np.inf)
    ew = g.edge_w
    eu = g.edge_u
    ev = g.edge_v
    exp = g.sig_exponents if len(ew) else np.zeros(0, dtype=np.int64)

    block = 1 << 18
    for start in range(0, total, block):
        stop = min(start + block, total)
        r = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((len(r), N), dtype=np.int64)
        for u in range(N - 1, -1, -1):
            digits[:, u] = r % (k + 1)
            r = r // (k + 1)
        mask = np.zeros(len(digits), dtype=np.int64)
        for u in range(N):
            mask |= (digits[:, u] < k).astype(np.int64) << u
        val = np.zeros(len(digits))
        for i in range(len(ew)):
            a = digits[:, eu[i]]
            b = digits[:, ev[i]]
            both = (a < k) & (b < k)
            val += np.where(both, ew[i] * chord[(exp[i] + b - a) % k], 0.0)
        order = np.argsort(mask, kind="stable")
        ms, vs = mask[order], val[order]
        starts = np.flatnonzero(np.r_[True, ms[1:] != ms[:-1]])
        mins = np.minimum.reduceat(vs, starts)
        um = ms[starts]
        iota[um] = np.minimum(iota[um], mins)
    iota[0] = np.inf  # the empty set has no ratio
    return iota


def _boundary_volume_tables(g: SignedGraph, mu: np.ndarray):
    N = g.n
    masks = np.arange(1 << N, dtype=np.int64)
    bnd = np.zeros(1 << N)
    for i in range(len(g.edge_w)):
        bit_u = (masks >> int(g.edge_u[i])) & 1
        bit_v = (masks >> int(g.edge_v[i])) & 1
        bnd += g.edge_w[i] * (bit_u ^ bit_v)
    vol = np.zeros(1 << N)
    for u in range(N):
        vol += mu[u] * ((masks >> u) & 1)
    return bnd, vol


def phi_table(g: SignedGraph, mu: np.ndarray | None = None) -> np.ndarray:
    """Exact phi for every nonempty subset, indexed by bitmask (inf at 0)."""
    mu = g.measure if mu is None else np.asarray(mu, dtype=np.float64)
    iota = all_subset_frustrations(g)
    bnd, vol = _boundary_volume_tables(g, mu)
    vol[0] = 1.0
    table = (iota + bnd) / vol
    table[0] = np.inf
    return table


def h_exact(
    g: SignedGraph, n: int, mu: np.ndarray | None = None
) -> tuple[float, list[tuple[int, ...]]]:
    """n-way Cheeger constant by exhaustive enumeration, with an optimizer.

    Enumerates assignments vertex -> {unassigned, part 1..n} in canonical
    label order and minimizes the worst per-part ratio, using the exact
    per-subset frustration table.
    """
    if n < 1 or n > g.n:
        raise ValueError(f"need 1 <= n <= {g.n}, got {n}")
    N = g.n
    total = (n + 1) ** N
    if total > ENUMERATION_CAP:
        raise CapExceededError(f"(n+1)^N = {total} exceeds cap {ENUMERATION_CAP}")
    table = phi_table(g, mu)

    if n == 1:
        best = int(np.argmin(table))
        value = float(table[best])
        return value, [_mask_vertices(best)]

    best_val = math.inf
    best_masks: list[int] | None = None
    block = 1 << 16
    for start in range(0, total, block):
        stop = min(start + block, total)
        r = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((len(r), N), dtype=np.int64)
        for u in range(N - 1, -1, -1):
            digits[:, u] = r % (n + 1)
            r = r // (n + 1)
        # canonical labeling: scanning vertices upward, each new label must
        # extend the running maximum by one (kills the n! relabelings)
        running = np.zeros(len(digits), dtype=np.int64)
        ok = np.ones(len(digits), dtype=bool)
        for u in range(N):
            d = digits[:, u]
            fresh = d > running
            ok &= (~fresh) | (d == running + 1)
            running = np.maximum(running, d)
        ok &= running == n
        if not ok.any():
            continue
        val = np.zeros(len(digits))
        part_masks = []
        for p in range(1, n + 1):
            mask_p = np.zeros(len(digits), dtype=np.int64)
            for u in range(N):
                mask_p |= (digits[:, u] == p).astype(np.int64) << u
            part_masks.append(mask_p)
            val = np.maximum(val, table[mask_p])
        val[~ok] = np.inf
        i = int(np.argmin(val))
        if val[i] < best_val:
            best_val = float(val[i])
            best_masks = [int(pm[i]) for pm in part_masks]

    assert best_masks is not None
    return best_val, [_mask_vertices(m) for m in best_masks]


def _mask_vertices(mask: int) -> tuple[int, ...]:
    return tuple(u for u in range(mask.bit_length()) if (mask >> u) & 1)


# ---------------------------------------------------------------------------
# k-partiteness ratio
# ---------------------------------------------------------------------------


def kpartite_mismatch(g: SignedGraph, partition: OrderedKPartition) -> float:
    """Weighted mismatch of edges inside the base set against the labeling.

    Equals (1/2) sum_{i,j} sum_{l>0} |1-xi^l| |E^{i-j+l}(V_i, V_j)|: an edge
    u~v with exponent m and labels (i, j) contributes w |1 - xi^{m+j-i}|.
    """
    if g.group_kind != "cyclic" or partition.k != g.group_order:
        raise ValueError("partition arity must match the cyclic signature order")
    k = g.group_order
    chord = chord_lengths(k)
    lab = partition.labels()
    total = 0.0
    for i in range(len(g.edge_u)):
        u, v = int(g.edge_u[i]), int(g.edge_v[i])
        if u in lab and v in lab:
            total += g.edge_w[i] * chord[(int(g.sig_exponents[i]) + lab[v] - lab[u]) % k]
    return total


def k_partiteness_ratio(
    g: SignedGraph, partition: OrderedKPartition, mu: np.ndarray | None = None
) -> float:
    base = partition.base
    if not base:
        raise ValueError("k-partiteness ratio of an empty partition")
    num = kpartite_mismatch(g, partition)
    bnd = boundary_measure(g, base)
    vol = volume(g, base, mu)
    return (num + bnd) / vol


# ---------------------------------------------------------------------------
# Sweep cuts
# ---------------------------------------------------------------------------


def _sweep_prepare(g: SignedGraph, f, mu):
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (g.n,):
        raise ValueError("sweep needs one complex value per vertex")
    amax = float(np.max(np.abs(f)))
    if amax == 0.0:
        raise ValueError("cannot sweep the zero function")
    f = f / amax
    mu = g.measure if mu is None else np.asarray(mu, dtype=np.float64)
    return f, np.abs(f), mu


def _descending_level_groups(a: np.ndarray):
    """Vertices grouped by equal squared modulus, highest level first."""
    nz = np.flatnonzero(a > 0.0)
    levels = np.unique(a[nz] ** 2)[::-1]
    groups = [(float(t), [int(u) for u in nz[a[nz] ** 2 == t]]) for t in levels]
    return groups


def sweep_cut_cyclic(
    g: SignedGraph, f, mu: np.ndarray | None = None
) -> ClusterCertificate:
    """Threshold-and-sector sweep over a complex vertex function.

    Scans every distinct superlevel set of |f| crossed with every sector
    offset at which some vertex changes sector (plus midpoints), evaluates
    the k-partiteness ratio of each induced ordered k-partition, and
    returns the minimizer.  Certified against 2 sqrt(2 d_mu R(f)).
    """
    if g.group_kind != "cyclic":
        raise ValueError("cyclic sweep needs a cyclic signature")
    k = g.group_order
    f, a, mu = _sweep_prepare(g, f, mu)
    r_quot = rayleigh(g, f, mu)
    bound = 2.0 * math.sqrt(2.0 * max_mu_degree(g, mu) * r_quot)
    chord = chord_lengths(k)
    width = 2.0 * math.pi / k

    angles = np.mod(np.angle(f), 2.0 * math.pi)
    nz_mask = a > 0.0
    breakpoints = np.unique(np.mod(angles[nz_mask], width))
    thetas = list(breakpoints)
    for i in range(len(breakpoints)):  # midpoints guard against boundary rounding
        nxt = breakpoints[(i + 1) % len(breakpoints)] + (width if i + 1 == len(breakpoints) else 0.0)
        thetas.append(0.5 * (breakpoints[i] + nxt) % width)

    groups = _descending_level_groups(a)
    best = None  # (ratio, t, theta, labels snapshot, members snapshot)
    for theta in thetas:
        lab = np.minimum(
            np.floor(np.mod(angles - theta, 2.0 * math.pi) / width).astype(np.int64),
            k - 1,
        )
        inside = np.zeros(g.n, dtype=bool)
        num = bnd = vol = 0.0
        members: list[int] = []
        for (t, verts) in groups:
            for u in verts:
                for v, ei, _orient in g.adjacency[u]:
                    w = float(g.edge_w[ei])
                    if inside[v]:
                        bnd -= w
                        su, sv = (int(g.edge_u[ei]), int(g.edge_v[ei]))
                        m = int(g.sig_exponents[ei])
                        num += w * chord[(m + lab[sv] - lab[su]) % k]
                    else:
                        bnd += w
                inside[u] = True
                members.append(u)
                vol += mu[u]
            ratio = (num + bnd) / vol
            if (
                best is None
                or ratio < best[0]
                or (ratio == best[0] and t < best[1])
            ):
                best = (ratio, t, float(theta), lab.copy(), list(members))

    ratio, t_star, theta_star, lab, members = best
    parts: list[list[int]] = [[] for _ in range(k)]
    for u in sorted(members):
        parts[int(lab[u])].append(u)
    partition = OrderedKPartition(tuple(tuple(p) for p in parts))
    num = kpartite_mismatch(g, partition)
    bnd = boundary_measure(g, members)
    vol = volume(g, members, mu)
    cert = ClusterCertificate(
        candidate=partition,
        ratio=(num + bnd) / vol,
        bound=bound,
        frustration_value=num,
        frustration_exact=False,
        boundary=bnd,
        volume=vol,
        t=t_star,
        theta=theta_star,
    )
    cert.validate()
    return cert


def sweep_cut_u1(g: SignedGraph, f, mu: np.ndarray | None = None) -> ClusterCertificate:
    """Threshold sweep for U(1) signatures.

    Each superlevel set of |f| is paired with the switching tau = f/|f|,
    which certifies an upper bound on its frustration index; the best
    resulting ratio is certified against (3/2) sqrt(2 d_mu R(f)).
    """
    f, a, mu = _sweep_prepare(g, f, mu)
    r_quot = rayleigh(g, f, mu)
    bound = 1.5 * math.sqrt(2.0 * max_mu_degree(g, mu) * r_quot)

    tau = np.ones(g.n, dtype=np.complex128)
    nz = a > 0.0
    tau[nz] = f[nz] / a[nz]

    groups = _descending_level_groups(a)
    inside = np.zeros(g.n, dtype=bool)
    num = bnd = vol = 0.0
    members: list[int] = []
    best = None
    for (t, verts) in groups:
        for u in verts:
            for v, ei, _orient in g.adjacency[u]:
                w = float(g.edge_w[ei])
                if inside[v]:
                    bnd -= w
                    su, sv = int(g.edge_u[ei]), int(g.edge_v[ei])
                    num += w * abs(tau[su] - g.sig_values[ei] * tau[sv])
                else:
                    bnd += w
            inside[u] = True
            members.append(u)
            vol += mu[u]
        ratio = (num + bnd) / vol
        if best is None or ratio < best[0] or (ratio == best[0] and t < best[1]):
            best = (ratio, t, num, bnd, vol, list(members))

    ratio, t_star, num, bnd, vol, members = best
    cert = ClusterCertificate(
        candidate=tuple(sorted(members)),
        ratio=ratio,
        bound=bound,
        frustration_value=num,
        frustration_exact=False,
        boundary=bnd,
        volume=vol,
        t=t_star,
        theta=None,
    )
    cert.validate()
    return cert

"""Balance detection and frustration indices.

Balance is decided per connected component by switching a spanning tree to
the trivial signature and inspecting the non-tree edges.  The frustration
index of a set is computed exactly for cyclic signatures by enumerating
switchings (with one vertex pinned per induced component), and bounded from
above for U(1) signatures by multi-start coordinate descent on the angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import hermitian_eigh
from .groups import (
    CircleElement,
    CyclicElement,
    GroupElement,
    chord_lengths,
    identity_like,
)
from .graphs import SignedGraph

ENUMERATION_CAP = 30_000_000
U1_ANGLE_TOL = 1e-9
GOLDEN_TOL = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class CapExceededError(RuntimeError):
    """Exact enumeration would evaluate more assignments than the cap allows."""


@dataclass(frozen=True)
class ComponentBalance:
    vertices: tuple[int, ...]
    balanced: bool
    witness: dict[int, GroupElement] | None
    violating_cycle: tuple[tuple[int, int], ...] | None
    cycle_signature: GroupElement | None


@dataclass(frozen=True)
class BalanceReport:
    components: tuple[ComponentBalance, ...]

    @property
    def balanced(self) -> bool:
        return all(c.balanced for c in self.components)

    @property
    def has_balanced_component(self) -> bool:
        return any(c.balanced for c in self.components)

    def witness(self) -> dict[int, GroupElement]:
        if not self.balanced:
            raise ValueError("graph is not balanced; no global witness")
        out: dict[int, GroupElement] = {}
        for c in self.components:
            out.update(c.witness)
        return out


def _is_trivial(s: GroupElement) -> bool:
    if isinstance(s, CyclicElement):
        return s.exponent == 0
    a = s.angle
    return min(a, 2.0 * math.pi - a) <= U1_ANGLE_TOL


def balance_check(g: SignedGraph) -> BalanceReport:
    """Per-component balance test with a trivializing witness or a violating cycle."""
    reports = []
    for comp in g.components():
        tau: dict[int, GroupElement] = {}
        parent: dict[int, tuple[int, int]] = {}  # child -> (parent, edge index)
        root = comp[0]
        tau[root] = identity_like(g.signatures[0]) if g.signatures else CyclicElement(1, 0)
        order = [root]
        tree_edges: set[int] = set()
        qi = 0
        while qi < len(order):
            u = order[qi]
            qi += 1
            for v, ei, _ in g.adjacency[u]:
                if v not in tau:
                    tau[v] = tau[u] * g.signature_from(ei, u)
                    parent[v] = (u, ei)
                    tree_edges.add(ei)
                    order.append(v)
        comp_set = set(comp)
        balanced = True
        cycle = None
        cycle_sig = None
        for (u, v, _, _s) in sorted(
            ((int(g.edge_u[i]), int(g.edge_v[i]), float(g.edge_w[i]), i) for i in range(len(g.edge_u))),
            key=lambda t: (min(t[0], t[1]), max(t[0], t[1])),
        ):
            ei = _s
            if ei in tree_edges or u not in comp_set:
                continue
            switched = tau[u] * g.signature_from(ei, u) * tau[v].inverse()
            if _is_trivial(switched):
                continue
            balanced = False
            cycle = _fundamental_cycle(u, v, parent)
            cycle_sig = switched
            break
        if balanced:
            # s^tau(u,v) = tau(u) s tau(v)^{-1} = 1 on tree edges by construction
            # and on the rest by the loop above, so tau itself is the witness
            witness = {u: tau[u] for u in comp}
            reports.append(ComponentBalance(tuple(comp), True, witness, None, None))
        else:
            reports.append(ComponentBalance(tuple(comp), False, None, cycle, cycle_sig))
    return BalanceReport(tuple(reports))


def _fundamental_cycle(u: int, v: int, parent: dict[int, tuple[int, int]]):
    """Oriented edges (u,v), then the tree path from v back to u."""
    anc_u = [u]
    while anc_u[-1] in parent:
        anc_u.append(parent[anc_u[-1]][0])
    anc_v = [v]
    while anc_v[-1] in parent:
        anc_v.append(parent[anc_v[-1]][0])
    in_u = {x: i for i, x in enumerate(anc_u)}
    li = next(i for i, x in enumerate(anc_v) if x in in_u)
    lca = anc_v[li]
    path = anc_v[: li + 1] + list(reversed(anc_u[: in_u[lca]]))  # v .. lca .. u
    cycle = [(u, v)]
    cycle += [(path[i], path[i + 1]) for i in range(len(path) - 1)]
    return tuple(cycle)


@dataclass(frozen=True, eq=False)
class FrustrationResult:
    value: float
    switching: dict[int, GroupElement]
    exact: bool = True

    def recompute(self, g: SignedGraph) -> float:
        """Objective at the stored switching; equals ``value`` to ~1e-10 by contract."""
        verts = set(self.switching)
        total = 0.0
        for i in range(len(g.edge_u)):
            u, v = int(g.edge_u[i]), int(g.edge_v[i])
            if u in verts and v in verts:
                tu = self.switching[u].value
                tv = self.switching[v].value
                total += g.edge_w[i] * abs(tu - g.sig_values[i] * tv)
        return total


def _induced_arrays(g: SignedGraph, subset):
    verts = sorted(set(int(u) for u in subset))
    if not verts:
        raise ValueError("frustration of the empty set is not defined")
    pos = {u: i for i, u in enumerate(verts)}
    eu, ev, ew, ee = [], [], [], []
    for i in range(len(g.edge_u)):
        u, v = int(g.edge_u[i]), int(g.edge_v[i])
        if u in pos and v in pos:
            eu.append(pos[u])
            ev.append(pos[v])
            ew.append(float(g.edge_w[i]))
            ee.append(i)
    return verts, np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64), np.array(ew), ee


def _components_of(nv: int, eu: np.ndarray, ev: np.ndarray) -> np.ndarray:
    label = np.arange(nv)

    def find(x):
        while label[x] != x:
            label[x] = label[label[x]]
            x = label[x]
        return x

    for a, b in zip(eu, ev):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            label[max(ra, rb)] = min(ra, rb)
    return np.array([find(i) for i in range(nv)])


def frustration_exact_cyclic(g: SignedGraph, subset=None) -> FrustrationResult:
    """Exact frustration index of a vertex set under a cyclic signature.

    Enumerates all switchings of the induced subgraph, one vertex per
    induced component pinned to the identity (global multiplication leaves
    the objective unchanged).  Refuses when the assignment count exceeds
    the enumeration cap.
    """
    if g.group_kind != "cyclic":
        raise ValueError("exact frustration needs a cyclic signature")
    k = g.group_order
    subset = range(g.n) if subset is None else subset
    verts, eu, ev, ew, eidx = _induced_arrays(g, subset)
    m = len(verts)
    if len(eu) == 0 or k == 1:
        return FrustrationResult(0.0, {u: CyclicElement(k, 0) for u in verts}, True)

    comp = _components_of(m, eu, ev)
    pinned = {int(np.min(np.where(comp == c)[0])) for c in np.unique(comp)}
    free = [i for i in range(m) if i not in pinned]
    total = k ** len(free)
    if total > ENUMERATION_CAP:
        raise CapExceededError(
            f"{total} assignments exceed the cap {ENUMERATION_CAP}; use the heuristic"
        )

    chord = np.array(chord_lengths(k))
    exp = np.array([g.sig_exponents[i] for i in eidx], dtype=np.int64)

    best_val = math.inf
    best_rank = -1
    block = 1 << 16
    weights_col = ew[np.newaxis, :]
    for start in range(0, total, block):
        stop = min(start + block, total)
        ranks = np.arange(start, stop, dtype=np.int64)
        digits = np.zeros((len(ranks), m), dtype=np.int64)
        r = ranks.copy()
        for pos in range(len(free) - 1, -1, -1):
            digits[:, free[pos]] = r % k
            r //= k
        mism = (exp[np.newaxis, :] + digits[:, ev] - digits[:, eu]) % k
        vals = (weights_col * chord[mism]).sum(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_rank = start + i

    digits = np.zeros(m, dtype=np.int64)
    r = best_rank
    for pos in range(len(free) - 1, -1, -1):
        digits[free[pos]] = r % k
        r //= k
    tau = {verts[i]: CyclicElement(k, int(digits[i])) for i in range(m)}
    return FrustrationResult(best_val, tau, True)


def _scan_golden_min(fun, n_grid: int = 24) -> tuple[float, float]:
    """Minimum of a periodic function on [0, 2pi): coarse grid scan to pick a
    bracket, then golden-section refinement inside it."""
    xs = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    vals = [fun(x) for x in xs]
    b = int(np.argmin(vals))
    step = 2.0 * math.pi / n_grid
    lo, hi = xs[b] - step, xs[b] + step
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    while hi - lo > GOLDEN_TOL:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = fun(x2)
    xm = 0.5 * (lo + hi)
    return xm % (2.0 * math.pi), fun(xm)


def frustration_heuristic_u1(
    g: SignedGraph, subset=None, restarts: int = 8, seed: int = 0
) -> FrustrationResult:
    """Upper bound on the U(1) frustration index by coordinate descent.

    Restart 0 starts from the phases of the lowest eigenvector of the
    induced magnetic Laplacian (exact on balanced sets); the remaining
    restarts use random angles.  Each vertex update solves its 1-D angular
    subproblem by golden-section search.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    subset = range(g.n) if subset is None else subset
    verts, eu, ev, ew, eidx = _induced_arrays(g, subset)
    m = len(verts)
    svals = np.array([g.sig_values[i] for i in eidx], dtype=np.complex128)
    if len(eu) == 0:
        return FrustrationResult(0.0, {u: CircleElement(0.0) for u in verts}, False)

    neigh: list[list[tuple[int, float, complex]]] = [[] for _ in range(m)]
    for a, b, w, s in zip(eu, ev, ew, svals):
        neigh[int(a)].append((int(b), float(w), s))
        neigh[int(b)].append((int(a), float(w), np.conj(s)))

    def objective(tau: np.ndarray) -> float:
        return float(np.sum(ew * np.abs(tau[eu] - svals * tau[ev])))

    def descend(tau: np.ndarray) -> tuple[float, np.ndarray]:
        current = objective(tau)
        for _ in range(500):
            for u in range(m):
                if not neigh[u]:
                    continue
                targets = np.array([s * tau[v] for v, _, s in neigh[u]])
                ws = np.array([w for _, w, _ in neigh[u]])

                def local(theta):
                    return float(np.sum(ws * np.abs(np.exp(1j * theta) - targets)))

                theta_star, _ = _scan_golden_min(local)
                if local(theta_star) < local(float(np.angle(tau[u])) % (2 * math.pi)):
                    tau[u] = np.exp(1j * theta_star)
            new = objective(tau)
            if current - new <= 1e-10 * max(1.0, current):
                current = new
                break
            current = new
        return current, tau

    starts: list[np.ndarray] = [_spectral_phases(g, verts, eu, ev, ew, eidx)]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    for _ in range(restarts - 1):
        starts.append(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=m)))

    best_val = math.inf
    best_tau = starts[0]
    for tau0 in starts:
        val, tau = descend(tau0.astype(np.complex128))
        if val < best_val:
            best_val, best_tau = val, tau.copy()
    switching = {verts[i]: CircleElement(float(np.angle(best_tau[i]))) for i in range(m)}
    return FrustrationResult(best_val, switching, False)


def _spectral_phases(g, verts, eu, ev, ew, eidx) -> np.ndarray:
    """Phases of a per-component ground state of the induced operator."""
    m = len(verts)
    tau = np.ones(m, dtype=np.complex128)
    comp = _components_of(m, eu, ev)
    svals = np.array([g.sig_values[i] for i in eidx], dtype=np.complex128)
    for c in np.unique(comp):
        idx = np.where(comp == c)[0]
        if len(idx) == 1:
            continue
        pos = {int(x): i for i, x in enumerate(idx)}
        H = np.zeros((len(idx), len(idx)), dtype=np.complex128)
        for a, b, w, s in zip(eu, ev, ew, svals):
            a, b = int(a), int(b)
            if a in pos and b in pos:
                H[pos[a], pos[a]] += w
                H[pos[b], pos[b]] += w
                H[pos[a], pos[b]] -= w * s
                H[pos[b], pos[a]] -= w * np.conj(s)
        _, vecs = hermitian_eigh(H)
        f = vecs[:, 0]
        mag = np.abs(f)
        big = mag > 1e-12 * mag.max()
        phases = np.ones(len(idx), dtype=np.complex128)
        phases[big] = f[big] / mag[big]
        tau[idx] = phases
    return tau


def line_index_of_balance(g: SignedGraph, subset=None) -> int:
    """Harary's line index e_min = iota/2 for unweighted graphs with k = 2."""
    if g.group_kind != "cyclic" or g.group_order != 2:
        raise ValueError("line index of balance needs a {+1,-1} signature")
    if not np.all(g.edge_w == 1.0):
        raise ValueError("line index of balance needs unit weights")
    res = frustration_exact_cyclic(g, subset)
    e_min = res.value / 2.0
    if abs(e_min - round(e_min)) > 1e-9:
        raise RuntimeError(f"line index came out non-integral: {e_min}")
    return int(round(e_min))

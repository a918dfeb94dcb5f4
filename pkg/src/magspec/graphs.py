"""Signed and mixed graph data model, text format parsing, and set functionals.

A signed graph is a simple weighted undirected graph whose oriented edges
carry unit-modulus group elements (cyclic roots of unity or U(1) phases),
with the reverse orientation carrying the inverse.  A mixed graph keeps
unoriented edges and oriented arcs separate; it is the input object for
detecting cyclic substructures in partially oriented graphs.

All graph objects are immutable after construction and safe to share
between concurrent readers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .groups import (
    CircleElement,
    CyclicElement,
    GroupElement,
    GroupMismatchError,
    identity_like,
    same_group,
)


class GraphFormatError(ValueError):
    """Malformed graph text; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    weight: float
    sig: GroupElement


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class SignedGraph:
    """Weighted simple graph with a unit-modulus signature and vertex measure.

    Vertices are dense integer ids 0..N-1; ``names`` maps them back to the
    labels used in graph files.  One orientation per edge is stored; the
    reverse signature is the exact group inverse.
    """

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int, float, GroupElement]],
        names: Sequence[str] | None = None,
        measure: Sequence[float] | None = None,
        default_measure: str = "degree",
        explicit_measure: dict[int, float] | None = None,
    ):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        if len(self.names) != n:
            raise ValueError("names length must match vertex count")

        seen: set[frozenset[int]] = set()
        sigs: list[GroupElement] = []
        eu, ev, ew = [], [], []
        ref_sig: GroupElement | None = None
        for (u, v, w, s) in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {{{u},{v}}}")
            seen.add(key)
            if not (w > 0.0) or not math.isfinite(w):
                raise ValueError(f"edge ({u},{v}) has nonpositive weight {w}")
            if ref_sig is None:
                ref_sig = s
            elif not same_group(ref_sig, s):
                raise GroupMismatchError("all signatures must live in one group")
            eu.append(u)
            ev.append(v)
            ew.append(w)
            sigs.append(s)

        self.edge_u = _frozen(np.asarray(eu, dtype=np.int64))
        self.edge_v = _frozen(np.asarray(ev, dtype=np.int64))
        self.edge_w = _frozen(np.asarray(ew, dtype=np.float64))
        self.signatures: tuple[GroupElement, ...] = tuple(sigs)

        if sigs and isinstance(sigs[0], CircleElement):
            self.group_kind = "circle"
            self.group_order = None
        else:
            self.group_kind = "cyclic"
            self.group_order = sigs[0].order if sigs else 1

        self.explicit_measure = dict(explicit_measure) if explicit_measure else {}
        if measure is not None:
            mu = np.asarray(measure, dtype=np.float64).copy()
            if mu.shape != (n,):
                raise ValueError("measure length must match vertex count")
        else:
            mu = self._default_measure(default_measure)
            for i, m in self.explicit_measure.items():
                mu[i] = m
        if not np.all(mu > 0.0):
            raise ValueError("vertex measures must be strictly positive")
        self.measure = _frozen(mu)
        self.default_measure = default_measure

    def _default_measure(self, mode: str) -> np.ndarray:
        if mode == "unit":
            return np.ones(self.n)
        if mode == "degree":
            d = self.degrees.copy()
            d[d == 0.0] = 1.0  # isolated vertices: keep the measure positive
            return d
        raise ValueError(f"unknown measure mode {mode!r}")

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n)
        np.add.at(d, self.edge_u, self.edge_w)
        np.add.at(d, self.edge_v, self.edge_w)
        return _frozen(d)

    @cached_property
    def sig_values(self) -> np.ndarray:
        return _frozen(np.array([s.value for s in self.signatures], dtype=np.complex128))

    @cached_property
    def sig_exponents(self) -> np.ndarray:
        """Cyclic exponents per stored edge orientation (cyclic graphs only)."""
        if self.group_kind != "cyclic":
            raise GroupMismatchError("exponents are only defined for cyclic signatures")
        return _frozen(np.array([s.exponent for s in self.signatures], dtype=np.int64))

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int, int]]]:
        """Per vertex: list of (neighbor, edge index, +1 if stored as (u,v) else -1)."""
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n)]
        for i in range(len(self.edge_u)):
            u, v = int(self.edge_u[i]), int(self.edge_v[i])
            adj[u].append((v, i, +1))
            adj[v].append((u, i, -1))
        for lst in adj:
            lst.sort()
        return adj

    @property
    def edges(self) -> list[Edge]:
        return [
            Edge(int(u), int(v), float(w), s)
            for u, v, w, s in zip(self.edge_u, self.edge_v, self.edge_w, self.signatures)
        ]

    def signature_from(self, edge_index: int, tail: int) -> GroupElement:
        """Signature of the oriented edge leaving ``tail`` along stored edge ``edge_index``."""
        s = self.signatures[edge_index]
        return s if int(self.edge_u[edge_index]) == tail else s.inverse()

    def with_measure(self, mode: str) -> "SignedGraph":
        return SignedGraph(
            self.n,
            list(zip(self.edge_u, self.edge_v, self.edge_w, self.signatures)),
            names=self.names,
            default_measure=mode,
            explicit_measure=self.explicit_measure,
        )

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest member."""
        seen = [False] * self.n
        comps = []
        for root in range(self.n):
            if seen[root]:
                continue
            stack, comp = [root], []
            seen[root] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, _, _ in self.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def subgraph(self, vertices: Iterable[int]) -> tuple["SignedGraph", dict[int, int]]:
        """Induced subgraph plus the map from original ids to new dense ids."""
        verts = sorted(set(int(v) for v in vertices))
        if not verts:
            raise ValueError("cannot induce a subgraph on the empty set")
        remap = {v: i for i, v in enumerate(verts)}
        edges = []
        for i in range(len(self.edge_u)):
            u, v = int(self.edge_u[i]), int(self.edge_v[i])
            if u in remap and v in remap:
                edges.append((remap[u], remap[v], float(self.edge_w[i]), self.signatures[i]))
        sub = SignedGraph(
            len(verts),
            edges,
            names=[self.names[v] for v in verts],
            measure=self.measure[verts],
        )
        return sub, remap

    def canonical_edges(self) -> list[tuple[int, int, float, GroupElement]]:
        out = []
        for i in range(len(self.edge_u)):
            u, v = int(self.edge_u[i]), int(self.edge_v[i])
            s = self.signatures[i]
            if u > v:
                u, v, s = v, u, s.inverse()
            out.append((u, v, float(self.edge_w[i]), s))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.names == other.names
            and np.array_equal(self.measure, other.measure)
            and self.canonical_edges() == other.canonical_edges()
        )

    def __repr__(self) -> str:
        grp = f"S1_{self.group_order}" if self.group_kind == "cyclic" else "U(1)"
        return f"SignedGraph(n={self.n}, edges={len(self.edge_u)}, group={grp})"


class MixedGraph:
    """Partially oriented graph: unoriented edges plus oriented arcs."""

    def __init__(
        self,
        n: int,
        undirected: Sequence[tuple[int, int, float]],
        arcs: Sequence[tuple[int, int, float]],
        names: Sequence[str] | None = None,
        explicit_measure: dict[int, float] | None = None,
    ):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        seen: set[frozenset[int]] = set()
        for (u, v, w) in list(undirected) + list(arcs):
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"vertices {u},{v} form more than one edge or arc")
            seen.add(key)
            if not (w > 0.0):
                raise ValueError(f"nonpositive weight on ({u},{v})")
        self.undirected = tuple((int(u), int(v), float(w)) for u, v, w in undirected)
        self.arcs = tuple((int(u), int(v), float(w)) for u, v, w in arcs)
        self.explicit_measure = dict(explicit_measure) if explicit_measure else {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        def canon(es):
            return sorted((min(u, v), max(u, v), w) for u, v, w in es)

        return (
            self.n == other.n
            and self.names == other.names
            and canon(self.undirected) == canon(other.undirected)
            and sorted(self.arcs) == sorted(other.arcs)
        )

    def __repr__(self) -> str:
        return f"MixedGraph(n={self.n}, undirected={len(self.undirected)}, arcs={len(self.arcs)})"


def mixed_to_signed(m: MixedGraph, k: int, default_measure: str = "degree") -> SignedGraph:
    """Drop orientations and encode them as an order-k cyclic signature.

    Unoriented edges get the identity; an arc (u, v) gets s_uv = xi (so the
    reverse orientation carries xi^{-1}).  The directed structure is balanced
    exactly when it has the ideal cyclically layered form.
    """
    if k < 2:
        raise ValueError(f"cyclic order must be >= 2, got {k}")
    edges: list[tuple[int, int, float, GroupElement]] = []
    for (u, v, w) in m.undirected:
        edges.append((u, v, w, CyclicElement(k, 0)))
    for (u, v, w) in m.arcs:
        edges.append((u, v, w, CyclicElement(k, 1)))
    edges.sort(key=lambda t: (min(t[0], t[1]), max(t[0], t[1])))
    return SignedGraph(
        m.n,
        edges,
        names=m.names,
        default_measure=default_measure,
        explicit_measure=m.explicit_measure,
    )


def switch(g: SignedGraph, tau: dict[int, GroupElement] | Sequence[GroupElement]) -> SignedGraph:
    """Apply the switching s^tau(u,v) = tau(u) s(u,v) tau(v)^{-1}.

    Weights and measures are untouched; spectra and balance are invariant.
    """
    if isinstance(tau, dict):
        values = [tau.get(u) for u in range(g.n)]
        if any(t is None for t in values):
            raise ValueError("switching function must be defined on every vertex")
    else:
        values = list(tau)
        if len(values) != g.n:
            raise ValueError("switching function must be defined on every vertex")
    if g.signatures and not same_group(values[0], g.signatures[0]):
        raise GroupMismatchError("switching values must live in the signature group")
    edges = []
    for i in range(len(g.edge_u)):
        u, v = int(g.edge_u[i]), int(g.edge_v[i])
        s_new = values[u] * g.signatures[i] * values[v].inverse()
        edges.append((u, v, float(g.edge_w[i]), s_new))
    return SignedGraph(
        g.n,
        edges,
        names=g.names,
        measure=g.measure,
        explicit_measure=g.explicit_measure,
    )


def boundary_measure(g: SignedGraph, subset: Iterable[int]) -> float:
    """Total weight of edges leaving ``subset``."""
    inside = np.zeros(g.n, dtype=bool)
    inside[list(subset)] = True
    crossing = inside[g.edge_u] ^ inside[g.edge_v]
    return float(g.edge_w[crossing].sum())


def volume(g: SignedGraph, subset: Iterable[int], mu: np.ndarray | None = None) -> float:
    """Measure of ``subset`` under mu (graph default when omitted)."""
    subset = list(subset)
    if not subset:
        raise ValueError("volume of the empty set is not defined here")
    mu = g.measure if mu is None else np.asarray(mu)
    return float(mu[subset].sum())


def set_functionals(g: SignedGraph, subset: Iterable[int], mu: np.ndarray | None = None) -> tuple[float, float]:
    """(boundary, volume) of a nonempty vertex set."""
    subset = list(subset)
    if not subset:
        raise ValueError("set functionals need a nonempty set")
    return boundary_measure(g, subset), volume(g, subset, mu)


def max_mu_degree(g: SignedGraph, mu: np.ndarray | None = None) -> float:
    """d_mu = max_u (weighted degree / measure), the natural spectral scale."""
    mu = g.measure if mu is None else np.asarray(mu)
    return float(np.max(g.degrees / mu))


# ---------------------------------------------------------------------------
# Text format
#
#   # comment
#   v <name> [measure]
#   e <u> <v> <w>            unoriented edge, trivial signature
#   a <u> <v> <w>            oriented arc (mixed graphs only)
#   s <u> <v> <w> <j>/<k>    cyclic signature s_uv = xi_k^j
#   p <u> <v> <w> <theta>    U(1) signature s_uv = e^{i theta}
# ---------------------------------------------------------------------------


def parse_graph(text: str, default_measure: str = "degree") -> SignedGraph | MixedGraph:
    """Parse the line-oriented graph format; errors carry line numbers."""
    names: list[str] = []
    ids: dict[str, int] = {}
    explicit_measure: dict[int, float] = {}
    declared: set[str] = set()
    sig_edges: list[tuple[int, int, float, GroupElement, int]] = []
    und_edges: list[tuple[int, int, float, int]] = []
    arc_edges: list[tuple[int, int, float, int]] = []
    cyclic_k: int | None = None
    has_circle = False
    seen_pairs: dict[frozenset[int], int] = {}

    def vid(name: str) -> int:
        if name not in ids:
            ids[name] = len(names)
            names.append(name)
        return ids[name]

    def endpoints(tok_u: str, tok_v: str, tok_w: str, line: int) -> tuple[int, int, float]:
        u, v = vid(tok_u), vid(tok_v)
        if u == v:
            raise GraphFormatError(f"loop at vertex {tok_u!r}", line)
        try:
            w = float(tok_w)
        except ValueError:
            raise GraphFormatError(f"bad weight {tok_w!r}", line) from None
        if not (w > 0.0) or not math.isfinite(w):
            raise GraphFormatError(f"weight must be positive, got {tok_w}", line)
        key = frozenset((u, v))
        if key in seen_pairs:
            raise GraphFormatError(
                f"duplicate edge {tok_u} {tok_v} (first seen on line {seen_pairs[key]})", line
            )
        seen_pairs[key] = line
        return u, v, w

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        tag = tok[0]
        if tag == "v":
            if len(tok) not in (2, 3):
                raise GraphFormatError("vertex line needs: v <name> [measure]", lineno)
            if tok[1] in declared:
                raise GraphFormatError(f"vertex {tok[1]!r} declared twice", lineno)
            declared.add(tok[1])
            u = vid(tok[1])
            if len(tok) == 3:
                try:
                    m = float(tok[2])
                except ValueError:
                    raise GraphFormatError(f"bad measure {tok[2]!r}", lineno) from None
                if not (m > 0.0):
                    raise GraphFormatError("measure must be positive", lineno)
                explicit_measure[u] = m
        elif tag == "e":
            if len(tok) != 4:
                raise GraphFormatError("edge line needs: e <u> <v> <w>", lineno)
            u, v, w = endpoints(tok[1], tok[2], tok[3], lineno)
            und_edges.append((u, v, w, lineno))
        elif tag == "a":
            if len(tok) != 4:
                raise GraphFormatError("arc line needs: a <u> <v> <w>", lineno)
            u, v, w = endpoints(tok[1], tok[2], tok[3], lineno)
            arc_edges.append((u, v, w, lineno))
        elif tag == "s":
            if len(tok) != 5:
                raise GraphFormatError("signature line needs: s <u> <v> <w> <j>/<k>", lineno)
            u, v, w = endpoints(tok[1], tok[2], tok[3], lineno)
            frac = tok[4].split("/")
            if len(frac) != 2:
                raise GraphFormatError(f"malformed signature token {tok[4]!r}", lineno)
            try:
                j, k = int(frac[0]), int(frac[1])
            except ValueError:
                raise GraphFormatError(f"malformed signature token {tok[4]!r}", lineno) from None
            if k < 1:
                raise GraphFormatError(f"cyclic order must be >= 1, got {k}", lineno)
            if j < 0 or j >= k:
                raise GraphFormatError(f"exponent {j} out of range for order {k}", lineno)
            if has_circle:
                raise GraphFormatError("cannot mix cyclic and U(1) signatures", lineno)
            if cyclic_k is None:
                cyclic_k = k
            elif cyclic_k != k:
                raise GraphFormatError(
                    f"cyclic order {k} conflicts with earlier order {cyclic_k}", lineno
                )
            sig_edges.append((u, v, w, CyclicElement(k, j), lineno))
        elif tag == "p":
            if len(tok) != 5:
                raise GraphFormatError("phase line needs: p <u> <v> <w> <theta>", lineno)
            u, v, w = endpoints(tok[1], tok[2], tok[3], lineno)
            try:
                theta = float(tok[4])
            except ValueError:
                raise GraphFormatError(f"bad angle {tok[4]!r}", lineno) from None
            if cyclic_k is not None:
                raise GraphFormatError("cannot mix cyclic and U(1) signatures", lineno)
            has_circle = True
            sig_edges.append((u, v, w, CircleElement(theta), lineno))
        else:
            raise GraphFormatError(f"unknown record tag {tag!r}", lineno)

    if not names:
        raise GraphFormatError("graph has no vertices")

    if arc_edges:
        if sig_edges:
            raise GraphFormatError(
                "oriented arcs cannot be combined with signature lines", arc_edges[0][3]
            )
        return MixedGraph(
            len(names),
            [(u, v, w) for u, v, w, _ in und_edges],
            [(u, v, w) for u, v, w, _ in arc_edges],
            names=names,
            explicit_measure=explicit_measure,
        )

    if has_circle:
        trivial: GroupElement = CircleElement(0.0)
    else:
        trivial = CyclicElement(cyclic_k if cyclic_k is not None else 1, 0)
    edges = [(u, v, w, trivial) for u, v, w, _ in und_edges]
    edges += [(u, v, w, s) for u, v, w, s, _ in sig_edges]
    try:
        return SignedGraph(
            len(names),
            edges,
            names=names,
            default_measure=default_measure,
            explicit_measure=explicit_measure,
        )
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def serialize_graph(g: SignedGraph | MixedGraph) -> str:
    """Emit graph text that reparses to an equal graph."""
    lines = []
    for i, name in enumerate(g.names):
        if i in g.explicit_measure:
            lines.append(f"v {name} {g.explicit_measure[i]!r}")
        else:
            lines.append(f"v {name}")
    if isinstance(g, MixedGraph):
        for (u, v, w) in g.undirected:
            lines.append(f"e {g.names[u]} {g.names[v]} {w!r}")
        for (u, v, w) in g.arcs:
            lines.append(f"a {g.names[u]} {g.names[v]} {w!r}")
        return "\n".join(lines) + "\n"
    for (u, v, w, s) in g.canonical_edges():
        if isinstance(s, CircleElement):
            lines.append(f"p {g.names[u]} {g.names[v]} {w!r} {s.angle!r}")
        elif g.group_order == 1:
            lines.append(f"e {g.names[u]} {g.names[v]} {w!r}")
        else:
            lines.append(f"s {g.names[u]} {g.names[v]} {w!r} {s.exponent}/{s.order}")
    return "\n".join(lines) + "\n"


def negate_signature(g: SignedGraph) -> SignedGraph:
    """Flip the sign of every signature value (needs U(1) or even cyclic order)."""
    edges = [
        (int(u), int(v), float(w), s.negated())
        for u, v, w, s in zip(g.edge_u, g.edge_v, g.edge_w, g.signatures)
    ]
    return SignedGraph(g.n, edges, names=g.names, measure=g.measure,
                       explicit_measure=g.explicit_measure)

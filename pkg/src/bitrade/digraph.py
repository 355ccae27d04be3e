"""Directed multigraphs, asymmetric Laplacians and abelian sandpile groups."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple

from .zlinalg import AbelianGroup, IntMatrix, cokernel


class NotEulerian(ValueError):
    pass


class NotConnected(ValueError):
    pass


class Arc(NamedTuple):
    id: Hashable
    tail: Hashable
    head: Hashable


@dataclass(frozen=True)
class MultiDigraph:
    vertices: tuple
    arcs: tuple[Arc, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arcs", tuple(Arc(*a) for a in self.arcs))
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        ids = set()
        for a in self.arcs:
            if a.id in ids:
                raise ValueError(f"duplicate arc id {a.id!r}")
            ids.add(a.id)
            if a.tail not in index or a.head not in index:
                raise ValueError(f"arc {a.id!r} uses an unknown vertex")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, vertices: Iterable, pairs: Iterable[tuple]) -> MultiDigraph:
        """Arcs numbered 0, 1, ... in the order given."""
        return cls(tuple(vertices), tuple(Arc(i, t, h) for i, (t, h) in enumerate(pairs)))

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise KeyError(f"unknown vertex {v!r}") from None

    def arc(self, arc_id) -> Arc:
        for a in self.arcs:
            if a.id == arc_id:
                return a
        raise KeyError(arc_id)

    def out_degree(self, v) -> int:
        return sum(1 for a in self.arcs if a.tail == v)

    def in_degree(self, v) -> int:
        return sum(1 for a in self.arcs if a.head == v)

    def arc_counts(self) -> Counter:
        return Counter((a.tail, a.head) for a in self.arcs)

    def is_eulerian(self) -> bool:
        out = Counter(a.tail for a in self.arcs)
        inn = Counter(a.head for a in self.arcs)
        return all(out[v] == inn[v] for v in self.vertices)

    def is_connected(self) -> bool:
        return _connected(self.vertices, [(a.tail, a.head) for a in self.arcs])

    def reverse(self) -> MultiDigraph:
        return MultiDigraph(self.vertices, tuple(Arc(a.id, a.head, a.tail) for a in self.arcs))

    def relabel(self, mapping: dict) -> MultiDigraph:
        return MultiDigraph(tuple(mapping[v] for v in self.vertices),
                            tuple(Arc(a.id, mapping[a.tail], mapping[a.head]) for a in self.arcs))


def _connected(vertices, edges, skip_vertex=None, skip_edges=()) -> bool:
    """Connectivity of the underlying undirected multigraph."""
    verts = [v for v in vertices if v != skip_vertex]
    if len(verts) <= 1:
        return True
    adj = {v: [] for v in verts}
    for k, (u, v) in enumerate(edges):
        if k in skip_edges or skip_vertex in (u, v):
            continue
        adj[u].append(v)
        adj[v].append(u)
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def laplacian(D: MultiDigraph) -> IntMatrix:
    """Out-degree diagonal minus the arc-count adjacency matrix."""
    if not D.vertices:
        raise ValueError("empty digraph")
    n = len(D.vertices)
    L = [[0] * n for _ in range(n)]
    for a in D.arcs:
        i, j = D.index(a.tail), D.index(a.head)
        L[i][i] += 1
        L[i][j] -= 1
    return IntMatrix.from_rows(L, n)


def reduced_laplacian(D: MultiDigraph, v) -> IntMatrix:
    i = D.index(v)
    return laplacian(D).delete(i, i)


def sandpile_group(D: MultiDigraph, v=None) -> AbelianGroup:
    """Cokernel of the reduced Laplacian; v defaults to the last vertex."""
    if not D.is_eulerian():
        raise NotEulerian("in-degree differs from out-degree somewhere")
    if not D.is_connected():
        raise NotConnected("digraph is not connected")
    if len(D.vertices) == 1:
        return AbelianGroup()
    if v is None:
        v = D.vertices[-1]
    G = cokernel(reduced_laplacian(D, v))
    if G.free_rank:
        raise AssertionError("connected Eulerian digraph gave an infinite sandpile group")
    return G


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    eulerian: bool
    has_loops: bool
    cut_vertices: frozenset
    two_edge_cuts: frozenset  # of frozenset({arc_id, arc_id})

    @property
    def prop_simple_ok(self) -> bool:
        return (self.connected and not self.has_loops
                and not self.cut_vertices and not self.two_edge_cuts)


def _bridges(vertices, edges, removed: int) -> list[int]:
    """Indices of bridges in the multigraph with edge `removed` deleted.

    Lowlink DFS keyed on edge ids, so parallel edges are never bridges.
    """
    adj = {v: [] for v in vertices}
    for k, (u, v) in enumerate(edges):
        if k == removed or u == v:
            continue
        adj[u].append((v, k))
        adj[v].append((u, k))
    disc, low, out = {}, {}, []
    counter = 0
    for root in vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, k in it:
                if k == via:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, k, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        out.append(via)
    return out


def audit(D: MultiDigraph) -> ConnectivityReport:
    """Connectivity conditions on D and its underlying multigraph.

    Every arc becomes one undirected edge, so an antiparallel pair is two
    parallel edges.  Every pair containing a bridge is a two-edge cut.  A
    bridge-free cut {e, f} separates the ends of e, so every other copy of
    e must be f: edges of multiplicity three or more never occur, a doubled
    edge can only pair with its twin, and a single edge e pairs exactly with
    the bridges of D - e.
    """
    verts = D.vertices
    edges = [(a.tail, a.head) for a in D.arcs]
    ids = [a.id for a in D.arcs]
    connected = _connected(verts, edges)
    cut_vertices = set()
    cuts = set()
    if connected:
        if len(verts) > 2:
            cut_vertices = {v for v in verts if not _connected(verts, edges, skip_vertex=v)}
        classes = {}
        for k, (u, v) in enumerate(edges):
            if u != v:
                classes.setdefault(frozenset((u, v)), []).append(k)
        bridges = set(_bridges(verts, edges, None))
        for b in bridges:
            cuts.update(frozenset((ids[b], ids[j])) for j in range(len(edges)) if j != b)
        for same in classes.values():
            if len(same) == 2:
                j, k = same
                if not _connected(verts, edges, skip_edges={j, k}):
                    cuts.add(frozenset((ids[j], ids[k])))
            elif len(same) == 1 and same[0] not in bridges:
                k = same[0]
                cuts.update(frozenset((ids[k], ids[j])) for j in _bridges(verts, edges, k))
    return ConnectivityReport(
        connected=connected,
        eulerian=D.is_eulerian(),
        has_loops=any(a.tail == a.head for a in D.arcs),
        cut_vertices=frozenset(cut_vertices),
        two_edge_cuts=frozenset(cuts),
    )

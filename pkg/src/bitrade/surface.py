"""Rotation systems, face tracing, two-coloured triangulations and Tutte's
digraph construction in both directions.

Rotations are listed counterclockwise.  A dart is an arc end: the out end of
an arc sits at its tail, the in end at its head.  Faces are the orbits of
"cross the arc, then step to the next end in rotation order".
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from .digraph import MultiDigraph, NotConnected, NotEulerian
from .latin import (CLASSES, LatinBitrade, NotSeparated, label_key, separation, triple_key, validate_bitrade)

OUT, IN = "out", "in"
DEFAULT_MAX_ARCS = 24


class MalformedRotation(ValueError):
    pass


class NonSpherical(ValueError):
    pass


class NotDirectedEulerian(ValueError):
    pass


class NotABitrade(ValueError):
    pass


class SearchTooLarge(ValueError):
    pass


class ArcEnd(NamedTuple):
    arc: object
    dir: str  # "out" at the tail, "in" at the head

    def flip(self) -> ArcEnd:
        return ArcEnd(self.arc, IN if self.dir == OUT else OUT)


@dataclass(frozen=True)
class EmbeddedDigraph:
    digraph: MultiDigraph
    rotation: dict  # vertex -> tuple of ArcEnd, counterclockwise

    def __post_init__(self):
        rot = {v: tuple(ArcEnd(*e) for e in self.rotation.get(v, ()))
               for v in self.digraph.vertices}
        extra = set(self.rotation) - set(rot)
        if extra:
            raise MalformedRotation(f"rotation mentions unknown vertices {sorted(map(str, extra))}")
        expected = {}
        for a in self.digraph.arcs:
            expected[ArcEnd(a.id, OUT)] = a.tail
            expected[ArcEnd(a.id, IN)] = a.head
        seen = {}
        for v, ends in rot.items():
            for e in ends:
                if e.dir not in (IN, OUT):
                    raise MalformedRotation(f"bad direction {e.dir!r} at {v!r}")
                if e not in expected:
                    raise MalformedRotation(f"unknown arc end {e} at {v!r}")
                if e in seen:
                    raise MalformedRotation(f"arc end {e} listed twice")
                if expected[e] != v:
                    raise MalformedRotation(f"arc end {e} listed at {v!r}, belongs at {expected[e]!r}")
                seen[e] = v
        if len(seen) != len(expected):
            missing = sorted((str(e) for e in expected if e not in seen))
            raise MalformedRotation(f"arc ends missing from rotation: {missing[:4]}")
        object.__setattr__(self, "rotation", rot)

    def alternates(self) -> bool:
        for ends in self.rotation.values():
            n = len(ends)
            if any(ends[i].dir == ends[(i + 1) % n].dir for i in range(n)):
                return False
        return True

    def next_end(self) -> dict:
        """sigma: each arc end to its counterclockwise successor."""
        out = {}
        for ends in self.rotation.values():
            for i, e in enumerate(ends):
                out[e] = ends[(i + 1) % len(ends)]
        return out


@dataclass(frozen=True)
class FaceReport:
    faces: tuple  # each face is a tuple of arc ends; its arc ids via face_arcs
    genus: int
    all_directed: bool
    out_faces: tuple  # indices of faces traversing every arc forwards
    in_faces: tuple   # indices of faces traversing every arc backwards

    def face_arcs(self, i: int) -> tuple:
        return tuple(e.arc for e in self.faces[i])

    @property
    def face_count(self) -> int:
        return len(self.faces)


def trace_faces(E: EmbeddedDigraph) -> FaceReport:
    D = E.digraph
    sigma = E.next_end()
    seen = set()
    faces = []
    for a in D.arcs:
        for start in (ArcEnd(a.id, OUT), ArcEnd(a.id, IN)):
            if start in seen:
                continue
            face = []
            x = start
            while x not in seen:
                seen.add(x)
                face.append(x)
                x = sigma[x.flip()]
            if x != start:
                raise MalformedRotation("face tracing did not close")
            faces.append(tuple(face))
    isolated = sum(1 for v in D.vertices if not E.rotation[v])
    F = len(faces) + isolated
    V, n_arcs = len(D.vertices), len(D.arcs)
    comps = _components(D)
    chi = V - n_arcs + F
    if (2 * comps - chi) % 2:
        raise MalformedRotation("odd Euler characteristic")
    genus = (2 * comps - chi) // 2
    outs = tuple(i for i, f in enumerate(faces) if all(e.dir == OUT for e in f))
    ins = tuple(i for i, f in enumerate(faces) if all(e.dir == IN for e in f))
    return FaceReport(tuple(faces), genus, len(outs) + len(ins) == len(faces), outs, ins)


def _components(D: MultiDigraph) -> int:
    parent = {v: v for v in D.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a in D.arcs:
        parent[find(a.tail)] = find(a.head)
    return len({find(v) for v in D.vertices})


def is_spherical_eulerian(E: EmbeddedDigraph) -> bool:
    """Alternating rotation, every face directed, genus 0."""
    if not E.alternates():
        return False
    rep = trace_faces(E)
    return rep.genus == 0 and rep.all_directed


# --- search ---------------------------------------------------------------

def max_arcs_bound() -> int:
    raw = os.environ.get("TRINITY_MAX_ARCS")
    if raw is None:
        return DEFAULT_MAX_ARCS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"TRINITY_MAX_ARCS must be an integer, got {raw!r}") from None


def _planar(D: MultiDigraph) -> bool:
    import networkx as nx
    G = nx.Graph()
    G.add_nodes_from(range(len(D.vertices)))
    G.add_edges_from((D.index(a.tail), D.index(a.head)) for a in D.arcs if a.tail != a.head)
    return nx.check_planarity(G)[0]


def find_spherical_rotation(D: MultiDigraph, max_arcs: int | None = None) -> EmbeddedDigraph | None:
    """Exhaustive search for a directed Eulerian spherical embedding.

    An alternating rotation at v is the same thing as a pair of bijections
    f (in ends to out ends) and g (out ends to in ends) with f.g a single
    cycle.  Across all vertices these are two arc permutations: F sends an
    arc to the next arc of its forward face, B to the next arc of its
    backward face.  Faces are the cycles of F and B, so the search builds F
    and then B cycle by cycle until V - E + F = 2.
    """
    bound = max_arcs_bound() if max_arcs is None else max_arcs
    if len(D.arcs) > bound:
        raise SearchTooLarge(f"{len(D.arcs)} arcs exceeds the search bound {bound}")
    if not D.is_eulerian():
        raise NotEulerian("in-degree differs from out-degree somewhere")
    if not D.is_connected():
        raise NotConnected("digraph is not connected")
    if not D.arcs:
        return EmbeddedDigraph(D, {v: () for v in D.vertices})
    if not _planar(D):
        return None

    arcs = list(D.arcs)
    n = len(arcs)
    tail = [D.index(a.tail) for a in arcs]
    head = [D.index(a.head) for a in arcs]
    target = n - len(D.vertices) + 2
    outs_at = defaultdict(list)
    ins_at = defaultdict(list)
    for i in range(n):
        outs_at[tail[i]].append(i)
        ins_at[head[i]].append(i)
    outdeg = {v: len(x) for v, x in outs_at.items()}

    def cycle_search(succ_options, budget, check=None):
        """Yield bijections P (as lists) with P[i] in succ_options[i] whose
        cycle count is at least budget(...).  Builds one cycle at a time."""
        P = [None] * n
        used = [False] * n

        def extend(start, cur, closed, remaining):
            # upper bound on cycles: this open path plus unassigned arcs in digons
            if closed + 1 + (remaining // 2) < budget:
                return
            opts = succ_options[cur]
            if not used[start] and start in opts:
                ordered = [start] + [j for j in opts if j != start]
            else:
                ordered = opts
            for j in ordered:
                if used[j]:
                    continue
                P[cur] = j
                used[j] = True
                if check is None or check(P, cur):
                    if j == start:
                        yield from begin(closed + 1, remaining)
                    else:
                        yield from extend(start, j, closed, remaining - 1)
                used[j] = False
                P[cur] = None

        def begin(closed, remaining):
            free = next((i for i in range(n) if P[i] is None), None)
            if free is None:
                yield list(P), closed
                return
            yield from extend(free, free, closed, remaining - 1)

        yield from begin(0, n)

    fwd_opts = [[j for j in outs_at[head[i]]] for i in range(n)]
    back_opts = [[j for j in ins_at[tail[i]]] for i in range(n)]

    for F, f_cycles in cycle_search(fwd_opts, target - n // 2):
        need = target - f_cycles

        def vertex_ok(Bp, i, F=F):
            # h = F.B restricted to the out arcs at tail(i) must not close early
            v = tail[i]
            h = {a: F[Bp[a]] for a in outs_at[v] if Bp[a] is not None}
            seen = set()
            for s in h:
                if s in seen:
                    continue
                x, k = s, 0
                while x in h and x not in seen:
                    seen.add(x)
                    x = h[x]
                    k += 1
                if x == s and k < outdeg[v]:
                    return False
            return True

        for Bp, b_cycles in cycle_search(back_opts, need, vertex_ok):
            if b_cycles != need:
                continue
            rotation = {}
            for vi, v in enumerate(D.vertices):
                seq = []
                if outs_at[vi]:
                    a0 = outs_at[vi][0]
                    a = a0
                    while True:
                        seq.append(ArcEnd(arcs[a].id, OUT))
                        b = Bp[a]
                        seq.append(ArcEnd(arcs[b].id, IN))
                        a = F[b]
                        if a == a0:
                            break
                rotation[v] = tuple(seq)
            E = EmbeddedDigraph(D, rotation)
            if not is_spherical_eulerian(E):
                raise AssertionError("search produced an invalid embedding")
            return E
        # forward permutations with too few cycles are cut by the budget
    return None


# --- triangulations -------------------------------------------------------

def _class_index(I) -> int:
    if isinstance(I, int) and I in (0, 1, 2):
        return I
    key = str(I).lower()[:1]
    if key in CLASSES:
        return CLASSES.index(key)
    raise ValueError(f"class selector must be R, C or S, got {I!r}")


@dataclass(frozen=True)
class Triangulation:
    """White face (r,c,s) runs r, c, s counterclockwise; black runs r, s, c."""

    white_faces: tuple
    black_faces: tuple

    def __post_init__(self):
        object.__setattr__(self, "white_faces", tuple(sorted(map(tuple, self.white_faces), key=triple_key)))
        object.__setattr__(self, "black_faces", tuple(sorted(map(tuple, self.black_faces), key=triple_key)))

    @property
    def classes(self) -> tuple:
        faces = self.white_faces + self.black_faces
        return tuple(sorted({f[k] for f in faces}, key=label_key) for k in range(3))

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.classes)

    def vertices(self) -> list:
        return [(CLASSES[k], x) for k in range(3) for x in self.classes[k]]

    def face_boundaries(self) -> list:
        """(colour, index, counterclockwise boundary of tagged vertices)."""
        out = []
        for i, (r, c, s) in enumerate(self.white_faces):
            out.append(("W", i, (("r", r), ("c", c), ("s", s))))
        for i, (r, c, s) in enumerate(self.black_faces):
            out.append(("B", i, (("r", r), ("s", s), ("c", c))))
        return out

    def edge_problems(self) -> list[str]:
        """Each directed boundary edge must be used once, and its reverse
        by a face of the other colour."""
        problems = []
        owner = {}
        for colour, i, bd in self.face_boundaries():
            for k in range(3):
                e = (bd[k], bd[(k + 1) % 3])
                if e in owner:
                    problems.append(f"directed edge {e} used twice")
                owner[e] = colour
        for e, colour in owner.items():
            rev = owner.get((e[1], e[0]))
            if rev is None:
                problems.append(f"edge {e} lies on one face only")
            elif rev == colour:
                problems.append(f"edge {e} separates two faces of one colour")
        return problems

    def rotations(self) -> dict:
        """Counterclockwise cycle of faces around each vertex; raises if some
        vertex sees more than one cycle (a pinch point)."""
        problems = self.edge_problems()
        if problems:
            raise NotABitrade(problems[0])
        by_edge = {}
        at_vertex = defaultdict(list)
        for colour, i, bd in self.face_boundaries():
            for k in range(3):
                by_edge[(bd[k], bd[(k + 1) % 3])] = (colour, i)
                at_vertex[bd[k]].append((colour, i, k))
        boundary = {(c, i): bd for c, i, bd in self.face_boundaries()}
        rot = {}
        for v, incident in at_vertex.items():
            nxt = {}
            for colour, i, k in incident:
                bd = boundary[(colour, i)]
                y = bd[(k + 2) % 3]
                nxt[(colour, i)] = by_edge[(v, y)]
            start = min(nxt, key=lambda f: (f[0] != "W", f[1]))
            cyc = [start]
            f = nxt[start]
            while f != start:
                cyc.append(f)
                f = nxt[f]
            if len(cyc) != len(nxt):
                raise NotSeparated(f"vertex {v} has a pinched neighbourhood")
            rot[v] = tuple(cyc)
        return rot

    def euler_characteristic(self) -> int:
        F = len(self.white_faces) + len(self.black_faces)
        E = 3 * len(self.white_faces)
        return self.vertex_count - E + F

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2


def triangulation_from_bitrade(bt: LatinBitrade) -> Triangulation:
    if not isinstance(bt, LatinBitrade):
        W, B = bt
        check = validate_bitrade(W, B)
        if not check:
            raise NotABitrade("; ".join(check.problems[:3]))
        bt = LatinBitrade.of(W, B)
    if not separation(bt).separated:
        raise NotSeparated("bitrade is not separated; call separate() first")
    T = Triangulation(bt.W.triples, bt.B.triples)
    T.rotations()
    return T


def tutte_digraph(T: Triangulation, I="R") -> EmbeddedDigraph:
    """Digraph on class I with one arc per black face, from its I-vertex to
    the I-vertex of the white face across the opposite edge."""
    k = _class_index(I)
    if T.genus() != 0:
        raise NonSpherical(f"triangulation has genus {T.genus()}")
    rot = T.rotations()
    j, l = [x for x in range(3) if x != k]
    white_by_edge = {(w[j], w[l]): w for w in T.white_faces}
    arcs = []
    into = {}  # white face index -> arc id entering at its I-vertex
    white_index = {w: i for i, w in enumerate(T.white_faces)}
    for i, b in enumerate(T.black_faces):
        w = white_by_edge.get((b[j], b[l]))
        if w is None:
            raise NotABitrade(f"black face {b} has no white neighbour opposite its {CLASSES[k]} vertex")
        arcs.append((i, b[k], w[k]))
        into[white_index[w]] = i
    verts = T.classes[k]
    D = MultiDigraph(tuple(verts), tuple(arcs))
    tag = CLASSES[k]
    rotation = {}
    for v in verts:
        seq = []
        for colour, i in rot[(tag, v)]:
            seq.append(ArcEnd(i, OUT) if colour == "B" else ArcEnd(into[i], IN))
        rotation[v] = tuple(seq)
    E = EmbeddedDigraph(D, rotation)
    rep = trace_faces(E)
    if rep.genus != 0 or not rep.all_directed:
        raise AssertionError("Tutte digraph failed to embed spherically")
    return E


def bitrade_from_embedding(E: EmbeddedDigraph):
    """Inverse of tutte_digraph on the row class.

    Rows are the vertices of E, columns the faces traversed backwards and
    symbols the faces traversed forwards.  Arc a gives the black triangle
    (tail, back face, forward face) and the white one (head, back face,
    forward face).  Returns (triangulation, W, B), with W and B None when the
    triangulation is not simple enough to be a latin bitrade.
    """
    if not E.alternates():
        raise NotDirectedEulerian("rotation does not alternate in and out")
    rep = trace_faces(E)
    if not rep.all_directed:
        raise NotDirectedEulerian("some face is not a directed cycle")
    if rep.genus != 0:
        raise NonSpherical(f"embedding has genus {rep.genus}")
    fwd, back = {}, {}
    for n, i in enumerate(rep.out_faces):
        for e in rep.faces[i]:
            fwd[e.arc] = n
    for n, i in enumerate(rep.in_faces):
        for e in rep.faces[i]:
            back[e.arc] = n
    white, black = [], []
    for a in E.digraph.arcs:
        black.append((a.tail, back[a.id], fwd[a.id]))
        white.append((a.head, back[a.id], fwd[a.id]))
    T = Triangulation(white, black)
    if len(set(white)) == len(white) and len(set(black)) == len(black) \
            and validate_bitrade(white, black):
        bt = LatinBitrade.of(white, black)
        return T, bt.W, bt.B
    return T, None, None


def bitrade_of_embedding(E: EmbeddedDigraph) -> LatinBitrade | None:
    _, W, B = bitrade_from_embedding(E)
    return None if W is None else LatinBitrade(W, B)


def same_embedding(E1: EmbeddedDigraph, E2: EmbeddedDigraph) -> bool:
    """Equal as embedded digraphs up to renaming arcs (vertices fixed)."""
    D1, D2 = E1.digraph, E2.digraph
    if set(D1.vertices) != set(D2.vertices) or len(D1.arcs) != len(D2.arcs):
        return False
    if not D1.arcs:
        return True
    # rotations determine the arc matching once one arc is matched
    a0 = D1.arcs[0]
    for b0 in D2.arcs:
        if (b0.tail, b0.head) != (a0.tail, a0.head):
            continue
        m = {a0.id: b0.id}
        ok = True
        stack = [a0.id]
        n1, n2 = E1.next_end(), E2.next_end()
        while stack and ok:
            a = stack.pop()
            for d in (OUT, IN):
                x1, x2 = ArcEnd(a, d), ArcEnd(m[a], d)
                y1, y2 = n1[x1], n2[x2]
                if y1.dir != y2.dir:
                    ok = False
                    break
                if y1.arc in m:
                    if m[y1.arc] != y2.arc:
                        ok = False
                        break
                else:
                    m[y1.arc] = y2.arc
                    stack.append(y1.arc)
        if ok and len(m) == len(D1.arcs) and len(set(m.values())) == len(m):
            arc1 = {a.id: (a.tail, a.head) for a in D1.arcs}
            arc2 = {a.id: (a.tail, a.head) for a in D2.arcs}
            if all(arc1[x] == arc2[y] for x, y in m.items()):
                return True
    return False

"""Partial latin squares, latin bitrades and their canonical groups.

A triple is (row, col, sym).  Labels only have to be hashable and are scoped
to their class: row 0 and column 0 are different generators, so the row,
column and symbol sets are disjoint by construction.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .zlinalg import AbelianGroup, IntMatrix, cokernel

CLASSES = ("r", "c", "s")


class NotLatin(ValueError):
    pass


class InvalidBitrade(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems[:5]) or "invalid bitrade")


class NotSeparated(ValueError):
    pass


class NotConnectedBitrade(ValueError):
    pass


def label_key(x):
    """Sort key that tolerates a mix of int and str labels."""
    if isinstance(x, bool) or not isinstance(x, int):
        return (1, 0, str(x))
    return (0, x, "")


def triple_key(t):
    return tuple(label_key(x) for x in t)


def _latin_problems(triples, name) -> list[str]:
    problems = []
    seen = [{}, {}, {}]
    for t in sorted(triples, key=triple_key):
        for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            key = (t[i], t[j])
            if key in seen[k]:
                problems.append(f"{name}: {seen[k][key]} and {t} agree in two coordinates")
            else:
                seen[k][key] = t
    return problems


@dataclass(frozen=True)
class PartialLatinSquare:
    triples: frozenset

    def __post_init__(self):
        ts = frozenset(tuple(t) for t in self.triples)
        if any(len(t) != 3 for t in ts):
            raise ValueError("triples must have three entries")
        object.__setattr__(self, "triples", ts)
        problems = _latin_problems(ts, "P")
        if problems:
            raise NotLatin(problems[0])

    @classmethod
    def of(cls, triples: Iterable) -> PartialLatinSquare:
        return cls(frozenset(tuple(t) for t in triples))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, t):
        return tuple(t) in self.triples

    def sorted(self) -> list[tuple]:
        return sorted(self.triples, key=triple_key)

    def labels(self, k: int) -> list:
        return sorted({t[k] for t in self.triples}, key=label_key)

    @property
    def rows(self):
        return self.labels(0)

    @property
    def cols(self):
        return self.labels(1)

    @property
    def syms(self):
        return self.labels(2)


def _as_pls(P) -> PartialLatinSquare:
    return P if isinstance(P, PartialLatinSquare) else PartialLatinSquare.of(P)


@dataclass(frozen=True)
class BitradeCheck:
    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def _index(triples):
    """Maps (c,s)->r, (r,s)->c, (r,c)->s."""
    by_cs, by_rs, by_rc = {}, {}, {}
    for r, c, s in triples:
        by_cs[(c, s)] = r
        by_rs[(r, s)] = c
        by_rc[(r, c)] = s
    return by_cs, by_rs, by_rc


def _partners(t, other_index):
    """The three triples of the other square that cover t, or None where missing."""
    r, c, s = t
    by_cs, by_rs, by_rc = other_index
    out = []
    r2 = by_cs.get((c, s))
    out.append(None if r2 is None else (r2, c, s))
    c2 = by_rs.get((r, s))
    out.append(None if c2 is None else (r, c2, s))
    s2 = by_rc.get((r, c))
    out.append(None if s2 is None else (r, c, s2))
    return out


def validate_bitrade(W, B) -> BitradeCheck:
    """Check both latin properties and the covering condition in both directions."""
    W = {tuple(t) for t in W}
    B = {tuple(t) for t in B}
    problems = []
    if not W or not B:
        problems.append("W and B must be nonempty")
    problems += _latin_problems(W, "W") + _latin_problems(B, "B")
    if problems:
        return BitradeCheck(False, tuple(problems))
    common = W & B
    if common:
        problems.append(f"W and B share {sorted(common, key=triple_key)[0]}")
    if len(W) != len(B):
        problems.append(f"|W| = {len(W)} but |B| = {len(B)}")
    for name, A, other in (("W", W, B), ("B", B, W)):
        idx = _index(other)
        other_name = "B" if name == "W" else "W"
        for t in sorted(A, key=triple_key):
            for k, p in enumerate(_partners(t, idx)):
                if p is None:
                    problems.append(
                        f"{name} triple {t} has no {CLASSES[k]}-partner in {other_name}")
    return BitradeCheck(not problems, tuple(problems))


@dataclass(frozen=True)
class LatinBitrade:
    W: PartialLatinSquare
    B: PartialLatinSquare

    def __post_init__(self):
        check = validate_bitrade(self.W.triples if isinstance(self.W, PartialLatinSquare) else self.W,
                                 self.B.triples if isinstance(self.B, PartialLatinSquare) else self.B)
        if not check:
            raise InvalidBitrade(check.problems)
        object.__setattr__(self, "W", _as_pls(self.W))
        object.__setattr__(self, "B", _as_pls(self.B))

    @classmethod
    def of(cls, W: Iterable, B: Iterable) -> LatinBitrade:
        return cls(PartialLatinSquare.of(W), PartialLatinSquare.of(B))

    @property
    def size(self) -> int:
        return len(self.W)

    def labels(self, k: int) -> list:
        return self.W.labels(k)

    @property
    def vertex_count(self) -> int:
        return sum(len(self.labels(k)) for k in range(3))

    def swap(self) -> LatinBitrade:
        return LatinBitrade(self.B, self.W)

    def key(self):
        return ([triple_key(t) for t in self.W.sorted()],
                [triple_key(t) for t in self.B.sorted()])


INTERCALATE = LatinBitrade.of(
    [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
    [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)],
)


# --- separation -----------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    rows: dict
    cols: dict
    syms: dict

    @property
    def separated(self) -> bool:
        return all(len(cycles) == 1
                   for d in (self.rows, self.cols, self.syms) for cycles in d.values())

    def by_class(self, k: int) -> dict:
        return (self.rows, self.cols, self.syms)[k]


def _cycles(perm: dict) -> list[tuple]:
    seen, out = set(), []
    for start in sorted(perm, key=label_key):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        out.append(tuple(cyc))
    return out


def line_permutations(bt: LatinBitrade) -> tuple[dict, dict, dict]:
    """rho_r and rho_c act on symbols through a shared cell; rho_s acts on rows
    through a shared column."""
    b_rc = {(r, c): s for r, c, s in bt.B.triples}
    b_cs = {(c, s): r for r, c, s in bt.B.triples}
    rows, cols, syms = defaultdict(dict), defaultdict(dict), defaultdict(dict)
    for r, c, s in bt.W.triples:
        s2 = b_rc[(r, c)]
        rows[r][s] = s2
        cols[c][s] = s2
        syms[s][r] = b_cs[(c, s)]
    return dict(rows), dict(cols), dict(syms)


def separation(bt: LatinBitrade) -> SeparationReport:
    rows, cols, syms = line_permutations(bt)
    return SeparationReport(
        {x: _cycles(p) for x, p in rows.items()},
        {x: _cycles(p) for x, p in cols.items()},
        {x: _cycles(p) for x, p in syms.items()},
    )


def separate(bt: LatinBitrade) -> LatinBitrade:
    """Split every line whose permutation has several cycles, one new line per cycle."""
    rep = separation(bt)
    if rep.separated:
        return bt
    new_label = []
    for k in range(3):
        taken = {str(x) for x in bt.labels(k)}
        table = {}
        for x, cycles in rep.by_class(k).items():
            if len(cycles) == 1:
                continue
            for i, cyc in enumerate(cycles, 1):
                name = f"{x}.{i}"
                while name in taken:
                    name += "'"
                taken.add(name)
                for e in cyc:
                    table[(x, e)] = name
        new_label.append(table)

    def relabel(t):
        r, c, s = t
        return (new_label[0].get((r, s), r),
                new_label[1].get((c, s), c),
                new_label[2].get((s, r), s))

    return LatinBitrade.of(map(relabel, bt.W.triples), map(relabel, bt.B.triples))


def connectedness(bt: LatinBitrade) -> bool:
    """True iff no proper sub-bitrade exists.

    The sub-bitrades are exactly the unions of components of the graph
    joining each triple to the three triples covering it.
    """
    W, B = bt.W.triples, bt.B.triples
    idx = {"W": _index(B), "B": _index(W)}
    start = ("W", next(iter(W)))
    seen = {start}
    queue = deque([start])
    while queue:
        side, t = queue.popleft()
        other = "B" if side == "W" else "W"
        for p in _partners(t, idx[side]):
            node = (other, p)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return len(seen) == len(W) + len(B)


def bitrade_genus(bt: LatinBitrade) -> int:
    """Genus of the surface triangulated by the white and black faces."""
    if not separation(bt).separated:
        raise NotSeparated("genus is only defined for separated bitrades; call separate()")
    if not connectedness(bt):
        raise NotConnectedBitrade("genus is only defined for connected bitrades")
    euler = bt.vertex_count - bt.size
    g2 = 2 - euler
    if g2 % 2:
        raise AssertionError("odd Euler characteristic on an orientable surface")
    return g2 // 2


def is_spherical(bt: LatinBitrade) -> bool:
    try:
        return bitrade_genus(bt) == 0
    except (NotSeparated, NotConnectedBitrade):
        return False


# --- canonical group ------------------------------------------------------

@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    relation_matrix: IntMatrix
    group: AbelianGroup

    @property
    def canonical(self) -> AbelianGroup:
        """The torsion part."""
        return self.group.torsion


def canonical_group(P) -> GroupPresentation:
    """Abelian group on rows, columns and symbols with r + c + s = 0 per triple."""
    P = _as_pls(P)
    if not len(P):
        raise ValueError("empty partial latin square")
    gens = [(CLASSES[k], x) for k in range(3) for x in P.labels(k)]
    col = {g: j for j, g in enumerate(gens)}
    rows = []
    for t in P.sorted():
        row = [0] * len(gens)
        for k in range(3):
            row[col[(CLASSES[k], t[k])]] = 1
        rows.append(row)
    M = IntMatrix.from_rows(rows, len(gens))
    return GroupPresentation(tuple(gens), M, cokernel(M))


# --- main class -----------------------------------------------------------

def apply_main_class(P, roles: Sequence[int] = (0, 1, 2),
                     relabel: Sequence[dict | None] = (None, None, None)) -> PartialLatinSquare:
    """Relabel each class, then permute roles: new coordinate i is old coordinate roles[i]."""
    P = _as_pls(P)
    if sorted(roles) != [0, 1, 2]:
        raise ValueError(f"roles must be a permutation of (0, 1, 2): {roles}")
    maps = []
    for k in range(3):
        m = relabel[k] if k < len(relabel) else None
        labels = P.labels(k)
        if m is None:
            maps.append({x: x for x in labels})
            continue
        missing = [x for x in labels if x not in m]
        if missing:
            raise ValueError(f"relabeling of class {CLASSES[k]} misses {missing}")
        if len({m[x] for x in labels}) != len(labels):
            raise ValueError(f"relabeling of class {CLASSES[k]} is not injective")
        maps.append(m)
    out = []
    for t in P.triples:
        u = tuple(maps[k][t[k]] for k in range(3))
        out.append(tuple(u[roles[i]] for i in range(3)))
    return PartialLatinSquare.of(out)


def apply_main_class_bitrade(bt: LatinBitrade, roles=(0, 1, 2),
                             relabel=(None, None, None)) -> LatinBitrade:
    return LatinBitrade(apply_main_class(bt.W, roles, relabel),
                        apply_main_class(bt.B, roles, relabel))


# --- embeddings -----------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    group: AbelianGroup
    phi1: dict
    phi2: dict
    phi3: dict

    def maps(self):
        return (self.phi1, self.phi2, self.phi3)


def group_elements(G: AbelianGroup) -> list[tuple]:
    return list(product(*(range(d) for d in G.invariant_factors)))


def _add(x, y, mods):
    return tuple((a + b) % m for a, b, m in zip(x, y, mods))


def _sub(x, y, mods):
    return tuple((a - b) % m for a, b, m in zip(x, y, mods))


def is_embedding(P, emb: Embedding) -> bool:
    P = _as_pls(P)
    mods = emb.group.invariant_factors
    maps = emb.maps()
    for k in range(3):
        labels = P.labels(k)
        if any(x not in maps[k] for x in labels):
            return False
        if len({maps[k][x] for x in labels}) != len(labels):
            return False
    return all(_add(emb.phi1[r], emb.phi2[c], mods) == emb.phi3[s] for r, c, s in P.triples)


def embed_search(P, G: AbelianGroup) -> Embedding | None:
    """Exhaustive backtracking for phi1(r) + phi2(c) = phi3(s), injective per class.

    Translating rows and columns independently preserves embeddings, so the
    first row and first column are pinned to 0.
    """
    if not G.is_finite:
        raise ValueError("target group must be finite")
    P = _as_pls(P)
    if not len(P):
        raise ValueError("empty partial latin square")
    mods = G.invariant_factors
    order = G.order
    if any(len(P.labels(k)) > order for k in range(3)):
        return None
    elements = group_elements(G)
    zero = tuple(0 for _ in mods)
    triples = P.sorted()
    by_label = defaultdict(list)
    for t in triples:
        for k in range(3):
            by_label[(k, t[k])].append(t)

    def forced(assign, t):
        """Value forced on the single unassigned coordinate of t, if exactly one."""
        vals = [assign.get((k, t[k])) for k in range(3)]
        missing = [k for k in range(3) if vals[k] is None]
        if len(missing) != 1:
            return None
        k = missing[0]
        if k == 2:
            return k, _add(vals[0], vals[1], mods)
        if k == 1:
            return k, _sub(vals[2], vals[0], mods)
        return k, _sub(vals[2], vals[1], mods)

    def consistent(assign, t):
        vals = [assign.get((k, t[k])) for k in range(3)]
        return None in vals or _add(vals[0], vals[1], mods) == vals[2]

    def place(assign, used, key, value):
        if value in used[key[0]]:
            return False
        assign[key] = value
        used[key[0]].add(value)
        queue = [key]
        while queue:
            cur = queue.pop()
            for t in by_label[cur]:
                if not consistent(assign, t):
                    return False
                f = forced(assign, t)
                if f is None:
                    continue
                k, v = f
                nk = (k, t[k])
                if v in used[k]:
                    return False
                assign[nk] = v
                used[k].add(v)
                queue.append(nk)
        return True

    all_keys = [(k, x) for k in range(3) for x in P.labels(k)]

    def search(assign, used):
        free = [key for key in all_keys if key not in assign]
        if not free:
            return assign
        # branch on the label with most assigned neighbours
        def score(key):
            return sum(1 for t in by_label[key]
                       for k in range(3) if (k, t[k]) in assign)
        key = max(free, key=score)
        for g in elements:
            if g in used[key[0]]:
                continue
            a2 = dict(assign)
            u2 = [set(u) for u in used]
            if place(a2, u2, key, g):
                result = search(a2, u2)
                if result is not None:
                    return result
        return None

    assign, used = {}, [set(), set(), set()]
    r0, c0, _ = triples[0]
    if not place(assign, used, (0, r0), zero) or not place(assign, used, (1, c0), zero):
        return None
    result = search(assign, used)
    if result is None:
        return None
    maps = [{}, {}, {}]
    for (k, x), v in result.items():
        maps[k][x] = v
    return Embedding(G, *maps)


# --- enumeration ----------------------------------------------------------

DEFAULT_ENUMERATION_BOUND = 9


@dataclass
class EnumerationSummary:
    max_size: int
    count: int = 0
    by_size: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    nodes: int = 0

    def to_json(self) -> dict:
        return {"max_size": self.max_size, "normalized_forms": self.count,
                "by_size": {str(k): v for k, v in sorted(self.by_size.items())},
                "canonical_groups": dict(sorted(self.groups.items())),
                "search_nodes": self.nodes}


def normal_form(bt: LatinBitrade) -> tuple[tuple, tuple]:
    """Label-normalized form: relabel each class in first-use order along a
    breadth-first walk over covering triples, minimised over the starting
    white triple."""
    W, B = bt.W.triples, bt.B.triples
    idx = {"W": _index(B), "B": _index(W)}
    best = None
    for root in W:
        names = [{}, {}, {}]
        seen = {("W", root)}
        queue = deque([("W", root)])
        while queue:
            side, t = queue.popleft()
            for k in range(3):
                names[k].setdefault(t[k], len(names[k]))
            other = "B" if side == "W" else "W"
            for p in _partners(t, idx[side]):
                if (other, p) not in seen:
                    seen.add((other, p))
                    queue.append((other, p))
        w = tuple(sorted(tuple(names[k][t[k]] for k in range(3)) for t in W))
        b = tuple(sorted(tuple(names[k][t[k]] for k in range(3)) for t in B))
        if best is None or (w, b) < best:
            best = (w, b)
    return best


class _Grower:
    """Depth-first growth of a bitrade from one white triple.

    Every open covering requirement (a triple still missing a row-, column-
    or symbol-partner on the other side) is satisfied by an existing label
    or one fresh label, most constrained requirement first.  Lines whose
    permutation closes a short cycle are cut, since the result could not be
    separated.
    """

    def __init__(self, max_size: int):
        self.max = max_size
        self.per_class = max_size // 2
        self.sides = {"W": set(), "B": set()}
        # per side: (c,s)->r, (r,s)->c, (r,c)->s
        self.idx = {"W": ({}, {}, {}), "B": ({}, {}, {})}
        self.count = [defaultdict(int), defaultdict(int), defaultdict(int)]
        self.found = {}
        self.nodes = 0

    def add(self, side, t):
        r, c, s = t
        self.sides[side].add(t)
        cs, rs, rc = self.idx[side]
        cs[(c, s)] = r
        rs[(r, s)] = c
        rc[(r, c)] = s
        if side == "W":
            for k in range(3):
                self.count[k][t[k]] += 1

    def remove(self, side, t):
        r, c, s = t
        self.sides[side].discard(t)
        cs, rs, rc = self.idx[side]
        del cs[(c, s)], rs[(r, s)], rc[(r, c)]
        if side == "W":
            for k in range(3):
                self.count[k][t[k]] -= 1
                if not self.count[k][t[k]]:
                    del self.count[k][t[k]]

    def labels(self, k):
        out = set()
        for side in ("W", "B"):
            out.update(t[k] for t in self.sides[side])
        return out

    def fits(self, side, t):
        r, c, s = t
        cs, rs, rc = self.idx[side]
        return (c, s) not in cs and (r, s) not in rs and (r, c) not in rc

    def options(self, side, t, k, labels):
        """Candidate partner triples on the other side for coordinate k of t."""
        other = "B" if side == "W" else "W"
        pool = sorted(labels[k], key=label_key)
        if len(labels[k]) < self.per_class:
            pool.append(len(labels[k]))
        out = []
        for x in pool:
            if x == t[k]:
                continue
            u = list(t)
            u[k] = x
            u = tuple(u)
            if self.fits(other, u):
                out.append(u)
        return out

    def short_cycle(self, t) -> bool:
        r, c, s = t
        W = self.idx["W"]
        B = self.idx["B"]
        w_rc, b_rc = W[2], B[2]
        # row r and column c act on symbols, symbol s acts on rows
        row = {w_rc[(r, cc)]: b_rc[(r, cc)] for (rr, cc) in w_rc
               if rr == r and (r, cc) in b_rc}
        col = {w_rc[(rr, c)]: b_rc[(rr, c)] for (rr, cc) in w_rc
               if cc == c and (rr, c) in b_rc}
        w_cs, b_cs = W[0], B[0]
        sym = {w_cs[(cc, s)]: b_cs[(cc, s)] for (cc, ss) in w_cs
               if ss == s and (cc, s) in b_cs}
        for perm, size in ((row, self.count[0][r]), (col, self.count[1][c]),
                           (sym, self.count[2][s])):
            if len(perm) < size - 1 and len(perm) < 2:
                continue
            seen = set()
            for start in perm:
                if start in seen:
                    continue
                x, n = start, 0
                while x in perm and x not in seen:
                    seen.add(x)
                    x = perm[x]
                    n += 1
                if x == start and n < size:
                    return True
        return False

    def bound_ok(self) -> bool:
        nW, nB = len(self.sides["W"]), len(self.sides["B"])
        labels = [self.labels(k) for k in range(3)]
        V = sum(len(x) for x in labels)
        lower = max(nW, nB, V - 2, *(2 * len(x) for x in labels))
        return lower <= self.max

    def open_requirements(self):
        for side in ("W", "B"):
            other_idx = self.idx["B" if side == "W" else "W"]
            for t in self.sides[side]:
                r, c, s = t
                keys = ((c, s), (r, s), (r, c))
                for k in range(3):
                    if keys[k] not in other_idx[k]:
                        yield side, t, k

    def run(self):
        self.add("W", (0, 0, 0))
        self.grow()

    def grow(self):
        self.nodes += 1
        labels = [self.labels(k) for k in range(3)]
        best = None
        for side, t, k in self.open_requirements():
            opts = self.options(side, t, k, labels)
            if best is None or len(opts) < len(best[1]):
                best = (side, opts)
                if not opts:
                    return
        if best is None:
            self.complete()
            return
        side, opts = best
        other = "B" if side == "W" else "W"
        for u in opts:
            self.add(other, u)
            if self.bound_ok() and not self.short_cycle(u):
                self.grow()
            self.remove(other, u)

    def complete(self):
        W, B = set(self.sides["W"]), set(self.sides["B"])
        V = sum(len(self.labels(k)) for k in range(3))
        if V != len(W) + 2:
            return
        bt = LatinBitrade.of(W, B)
        if not separation(bt).separated:
            return
        key = normal_form(bt)
        if key not in self.found:
            self.found[key] = LatinBitrade.of(*key)


def enumerate_spherical_bitrades(max_size: int, bound: int = DEFAULT_ENUMERATION_BOUND
                                 ) -> tuple[list[LatinBitrade], EnumerationSummary]:
    """All connected separated spherical bitrades with |W| <= max_size, one
    per label-normalized form, sorted by (size, normal form)."""
    if max_size > bound:
        raise ValueError(f"max_size {max_size} exceeds the enumeration bound {bound}")
    summary = EnumerationSummary(max_size)
    if max_size < 4:
        return [], summary
    g = _Grower(max_size)
    g.run()
    out = []
    for key in sorted(g.found, key=lambda k: (len(k[0]), k)):
        bt = g.found[key]
        # independent re-validation of every candidate
        if not (connectedness(bt) and separation(bt).separated and bitrade_genus(bt) == 0):
            raise AssertionError(f"enumerator produced an invalid bitrade {key}")
        out.append(bt)
        summary.by_size[bt.size] = summary.by_size.get(bt.size, 0) + 1
        text = str(canonical_group(bt.W).canonical)
        summary.groups[text] = summary.groups.get(text, 0) + 1
    summary.count = len(out)
    summary.nodes = g.nodes
    return out, summary

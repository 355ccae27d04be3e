"""Digraph families with directed Eulerian spherical embeddings, the matrix
reductions behind them, and the group-to-construction planner."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Sequence

from .digraph import MultiDigraph, audit, sandpile_group
from .surface import IN, OUT, ArcEnd, EmbeddedDigraph, trace_faces
from .zlinalg import AbelianGroup, IntMatrix, group_from_cyclic_orders


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyInstance:
    embedded: EmbeddedDigraph
    expected_group: AbelianGroup
    family: str
    params: tuple

    @property
    def digraph(self) -> MultiDigraph:
        return self.embedded.digraph

    @property
    def label(self) -> str:
        return f"{self.family}{self.params}"


def verify_instance(inst: FamilyInstance) -> list[str]:
    """Empty list when the group, the connectivity audit and the embedding
    all check out."""
    problems = []
    D = inst.digraph
    got = sandpile_group(D)
    if got != inst.expected_group:
        problems.append(f"sandpile group {got} != expected {inst.expected_group}")
    rep = audit(D)
    if not rep.prop_simple_ok:
        problems.append(
            f"audit failed: connected={rep.connected} loops={rep.has_loops} "
            f"cut_vertices={len(rep.cut_vertices)} two_edge_cuts={len(rep.two_edge_cuts)}")
    if not inst.embedded.alternates():
        problems.append("rotation does not alternate")
    faces = trace_faces(inst.embedded)
    if faces.genus != 0:
        problems.append(f"embedding has genus {faces.genus}")
    if not faces.all_directed:
        problems.append("some face is not directed")
    return problems


# --- drawing builder --------------------------------------------------------
#
# A bundle is a run of parallel arcs between u and v whose directions
# alternate.  Listed counterclockwise at u, the same arcs appear in reverse
# order at v.  A bundle with as many arcs each way has a free phase (whether
# it starts with an out end); the phases are fixed by requiring every
# rotation to alternate, a parity system over GF(2).

@dataclass
class _Bundle:
    u: str
    v: str
    n_uv: int
    n_vu: int


class Drawing:
    def __init__(self):
        self.vertices: list[str] = []
        self.bundles: list[_Bundle] = []
        self.slots: dict[str, list[int]] = {}

    def vertex(self, *names):
        for v in names:
            if v in self.slots:
                raise ValueError(f"duplicate vertex {v}")
            self.vertices.append(v)
            self.slots[v] = []

    def bundle(self, u, v, n_uv, n_vu=None):
        """n_uv arcs u->v and n_vu arcs v->u (default: as many); None if empty."""
        n_vu = n_uv if n_vu is None else n_vu
        if n_uv == n_vu == 0:
            return None
        if abs(n_uv - n_vu) > 1:
            raise ValueError("bundle directions cannot alternate")
        if n_vu > n_uv:
            u, v, n_uv, n_vu = v, u, n_vu, n_uv
        self.bundles.append(_Bundle(u, v, n_uv, n_vu))
        return len(self.bundles) - 1

    def arc(self, u, v):
        return self.bundle(u, v, 1, 0)

    def place(self, v, bundles):
        self.slots[v].extend(b for b in bundles if b is not None)

    def _phases(self) -> dict[int, bool]:
        """Phase per even bundle: True when it starts with an out end at u."""
        even = [i for i, b in enumerate(self.bundles) if b.n_uv == b.n_vu]
        parent = {i: i for i in even}
        parity = {i: 0 for i in even}

        def find(i):
            if parent[i] == i:
                return i, 0
            root, p = find(parent[i])
            parent[i] = root
            parity[i] ^= p
            return root, parity[i]

        def ends(w, i):
            """(first, last) at w as (bundle or None, constant): value = x_bundle ^ const."""
            b = self.bundles[i]
            if b.n_uv == b.n_vu:
                return (i, 0), (i, 1)
            c = 1 if w == b.u else 0
            return (None, c), (None, c)

        fixed = {}
        for w in self.vertices:
            seq = self.slots[w]
            for k in range(len(seq)):
                last = ends(w, seq[k])[1]
                first = ends(w, seq[(k + 1) % len(seq)])[0]
                # last xor first must be 1 (an out end next to an in end)
                need = 1 ^ last[1] ^ first[1]
                xs = [x for x in (last[0], first[0]) if x is not None]
                if len(xs) == 0:
                    if need:
                        raise ValueError(f"rotation at {w} cannot alternate")
                elif len(xs) == 1:
                    r, p = find(xs[0])
                    val = need ^ p
                    if fixed.setdefault(r, val) != val:
                        raise ValueError(f"rotation at {w} cannot alternate")
                elif xs[0] == xs[1]:
                    if need:
                        raise ValueError(f"rotation at {w} cannot alternate")
                else:
                    (r1, p1), (r2, p2) = find(xs[0]), find(xs[1])
                    if r1 == r2:
                        if p1 ^ p2 != need:
                            raise ValueError(f"rotation at {w} cannot alternate")
                    else:
                        parent[r2] = r1
                        parity[r2] = p1 ^ p2 ^ need
                        if r2 in fixed:
                            val = fixed.pop(r2) ^ parity[r2]
                            if fixed.setdefault(r1, val) != val:
                                raise ValueError(f"rotation at {w} cannot alternate")
        out = {}
        for i in even:
            r, p = find(i)
            out[i] = bool(fixed.get(r, 1) ^ p)
        return out

    def build(self) -> EmbeddedDigraph:
        count = {}
        for seq in self.slots.values():
            for i in seq:
                count[i] = count.get(i, 0) + 1
        for i, b in enumerate(self.bundles):
            if count.get(i) != 2 or i not in self.slots[b.u] or i not in self.slots[b.v]:
                raise ValueError(f"bundle {b.u}-{b.v} must be placed once at each end")
        phase = self._phases()
        arcs = []
        at_u = {}
        for i, b in enumerate(self.bundles):
            total = b.n_uv + b.n_vu
            out_first = phase.get(i, True)
            ends = []
            for k in range(total):
                is_out = (k % 2 == 0) == out_first
                aid = len(arcs)
                arcs.append((aid, b.u, b.v) if is_out else (aid, b.v, b.u))
                ends.append(ArcEnd(aid, OUT if is_out else IN))
            at_u[i] = ends
        rotation = {}
        for w in self.vertices:
            seq = []
            for i in self.slots[w]:
                if w == self.bundles[i].u:
                    seq.extend(at_u[i])
                else:
                    seq.extend(e.flip() for e in reversed(at_u[i]))
            rotation[w] = tuple(seq)
        return EmbeddedDigraph(MultiDigraph(tuple(self.vertices), tuple(arcs)), rotation)


# --- families -------------------------------------------------------------

def _alpha(i):
    return f"alpha_{i}"


def _gamma(i):
    return f"gamma_{i}"


def _check_seq(a, name="a"):
    a = tuple(int(x) for x in a)
    if not a:
        raise ParameterError(f"{name} must have at least one entry (k >= 1)")
    if any(x < 2 for x in a):
        raise ParameterError(f"every entry of {name} must be >= 2, got {a}")
    return a


def _layered(p: int, a: Sequence[int], d: Sequence[int], e: Sequence[int],
             eps10: bool) -> Drawing:
    """The alpha/gamma ladder with d[i] delta and e[i] epsilon splits at level i+1.

    Level i joins alpha_{i-1} and gamma_i.  Counterclockwise, gamma_i sees
    gamma_{i+1}, gamma_{i-1}, its diagonal fan, then the bundle to alpha_i;
    alpha_i sees alpha_{i+1}, the next fan, the bundle to gamma_i, then
    alpha_{i-1}.  The two extra arcs close the ladder at either end.
    """
    k = len(a)
    dr = Drawing()
    for i in range(k, 0, -1):
        dr.vertex(_alpha(i), _gamma(i))
        dr.vertex(*(f"delta_{i}_{j}" for j in range(d[i - 1], 0, -1)))
        dr.vertex(*(f"epsilon_{i}_{j}" for j in range(e[i - 1], 0, -1)))
        if i == 1 and eps10:
            dr.vertex("epsilon_1_0")
    dr.vertex(_alpha(0))

    A = {i: dr.bundle(_alpha(i), _gamma(i), p - 1) for i in range(1, k + 1)}
    down = {i: dr.arc(_alpha(i), _alpha(i - 1)) for i in range(1, k + 1)}
    across = {i: dr.arc(_gamma(i), _gamma(i + 1)) for i in range(1, k)}
    top = dr.arc(_gamma(k), _alpha(k))
    if eps10:
        e10_in = dr.arc("epsilon_1_0", _gamma(1))
        e10_fan = dr.bundle(_alpha(0), "epsilon_1_0", p, p - 1)
        dr.place("epsilon_1_0", [e10_in, e10_fan])
        bottom_at_alpha0, bottom_at_gamma1 = e10_fan, e10_in
    else:
        bottom = dr.arc(_alpha(0), _gamma(1))
        bottom_at_alpha0 = bottom_at_gamma1 = bottom

    fan_gamma, fan_alpha = {}, {}
    for i in range(1, k + 1):
        lo, hi = _alpha(i - 1), _gamma(i)
        at_g, at_a = [], []
        for j in range(1, max(d[i - 1], e[i - 1]) + 1):
            if j <= d[i - 1]:
                v = f"delta_{i}_{j}"
                fan = dr.bundle(hi, v, p, p - 1)
                leg = dr.arc(v, lo)
                dr.place(v, [fan, leg])
                at_g.append(fan)
                at_a.append(leg)
            if j <= e[i - 1]:
                v = f"epsilon_{i}_{j}"
                leg = dr.arc(v, hi)
                fan = dr.bundle(lo, v, p, p - 1)
                dr.place(v, [leg, fan])
                at_g.append(leg)
                at_a.append(fan)
        rest = dr.bundle(hi, lo, a[i - 1] - 1 - d[i - 1], a[i - 1] - 1 - e[i - 1])
        fan_gamma[i] = at_g + [rest]
        fan_alpha[i] = list(reversed(at_a + [rest]))

    dr.place(_alpha(0), [down[1]] + fan_alpha[1] + [bottom_at_alpha0])
    for i in range(1, k + 1):
        first = top if i == k else down[i + 1]
        nxt = fan_alpha[i + 1] if i < k else []
        dr.place(_alpha(i), [first] + nxt + [A[i], down[i]])
        outward = top if i == k else across[i]
        inward = bottom_at_gamma1 if i == 1 else across[i - 1]
        dr.place(_gamma(i), [outward, inward] + fan_gamma[i] + [A[i]])
    return dr


def build_composites(m: int, a: Sequence[int]) -> FamilyInstance:
    """D_{m;a}: group Z_{m a_1} + ... + Z_{m a_k}."""
    if m < 2:
        raise ParameterError(f"m must be >= 2, got {m}")
    a = _check_seq(a)
    zeros = [0] * len(a)
    E = _layered(m, a, zeros, zeros, eps10=False).build()
    return FamilyInstance(E, group_from_cyclic_orders(m * x for x in a), "composites", (m, a))


def prime_split(a: Sequence[int], n: int) -> tuple[int, int]:
    """(k', t) with n = 1 + 2 sum_{i<=k'} (a_i - 1) + t, k' < k and t <= 2(a_{k'+1} - 1)."""
    kp, used = 0, 1
    while kp + 1 < len(a) and used + 2 * (a[kp] - 1) <= n:
        used += 2 * (a[kp] - 1)
        kp += 1
    return kp, n - used


def build_primes(p: int, a: Sequence[int], n: int) -> FamilyInstance:
    """D^n_{p;a}: group Z_p^n + Z_{p a_1} + ... + Z_{p a_k}."""
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    a = _check_seq(a)
    bound = 1 + 2 * sum(x - 1 for x in a)
    if not 0 <= n <= bound:
        raise ParameterError(f"n must satisfy 0 <= n <= 1 + 2*sum(a_i - 1) = {bound}, got {n}")
    expected = group_from_cyclic_orders([p] * n + [p * x for x in a])
    if n == 0:
        inst = build_composites(p, a)
        return FamilyInstance(inst.embedded, expected, "primes", (p, a, n))
    kp, t = prime_split(a, n)
    d = [a[i] - 1 for i in range(kp)] + [(t + 1) // 2] + [0] * (len(a) - kp - 1)
    e = [a[i] - 1 for i in range(kp)] + [t // 2] + [0] * (len(a) - kp - 1)
    E = _layered(p, a, d, e, eps10=True).build()
    return FamilyInstance(E, expected, "primes", (p, a, n))


def build_abc(a: int, b: int, c: int) -> FamilyInstance:
    """D_{a,b,c}: a hub joined to three paths whose ends are linked by
    bundles of a, b and c arcs each way; group Z_t + Z_t, t = ab+bc+ca+1."""
    if min(a, b, c) < 1:
        raise ParameterError(f"a, b, c must be >= 1, got {(a, b, c)}")
    dr = Drawing()
    lengths = {"alpha": a, "beta": b, "gamma": c}
    for name in ("gamma", "beta", "alpha"):
        dr.vertex(*(f"{name}_{i}" for i in range(1, lengths[name] + 1)))
    dr.vertex("delta")
    hub, path = {}, {}
    for name, n in lengths.items():
        hub[name] = dr.bundle("delta", f"{name}_1", 1)
        for i in range(1, n):
            path[(name, i)] = dr.bundle(f"{name}_{i}", f"{name}_{i + 1}", 1)
    end = {name: f"{name}_{n}" for name, n in lengths.items()}
    bg = dr.bundle(end["beta"], end["gamma"], a)
    ag = dr.bundle(end["alpha"], end["gamma"], b)
    ab = dr.bundle(end["alpha"], end["beta"], c)
    dr.place("delta", [hub["alpha"], hub["beta"], hub["gamma"]])
    for name, n in lengths.items():
        for i in range(1, n):
            prev = hub[name] if i == 1 else path[(name, i - 1)]
            dr.place(f"{name}_{i}", [path[(name, i)], prev])
    inner = {name: hub[name] if n == 1 else path[(name, n - 1)] for name, n in lengths.items()}
    dr.place(end["alpha"], [ab, inner["alpha"], ag])
    dr.place(end["beta"], [bg, inner["beta"], ab])
    dr.place(end["gamma"], [ag, inner["gamma"], bg])
    t = a * b + b * c + a * c + 1
    return FamilyInstance(dr.build(), AbelianGroup(0, (t, t)), "abc", (a, b, c))


def build_fig6(m: int) -> FamilyInstance:
    """A hub joined once each way to a triangle whose sides carry m arcs each
    way; group Z_{3m+1} + Z_{3m+1}."""
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    dr = Drawing()
    dr.vertex("a", "b", "c", "d")
    ab, ac, ad = (dr.bundle("a", x, 1) for x in "bcd")
    bc, cd, db = dr.bundle("b", "c", m), dr.bundle("c", "d", m), dr.bundle("d", "b", m)
    dr.place("a", [ab, ac, ad])
    dr.place("b", [bc, ab, db])
    dr.place("c", [cd, ac, bc])
    dr.place("d", [db, ad, cd])
    t = 3 * m + 1
    return FamilyInstance(dr.build(), AbelianGroup(0, (t, t)), "fig6", (m,))


def build_fig5(m: int) -> FamilyInstance:
    """Five-vertex core with an m-fold b-d bundle and a path of m vertices
    from f closing onto c and e; group Z_{6m+5} + Z_{6m+5}."""
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    dr = Drawing()
    dr.vertex("b", "c", "d", "e", "f", *(f"alpha_{i}" for i in range(1, m + 1)))
    fb, fc, fd, fe = (dr.bundle("f", x, 1) for x in "bcde")
    bc, bd, de = dr.bundle("b", "c", 1), dr.bundle("b", "d", m), dr.bundle("d", "e", 1)
    path = [dr.bundle("f", "alpha_1", 1)]
    for i in range(1, m):
        path.append(dr.bundle(f"alpha_{i}", f"alpha_{i + 1}", 1))
    last = f"alpha_{m}"
    ca, ea = dr.bundle("c", last, 1), dr.bundle("e", last, 1)
    dr.place("f", [path[0], fc, fb, fd, fe])
    dr.place("b", [bc, bd, fb])
    dr.place("c", [bc, fc, ca])
    dr.place("d", [fd, bd, de])
    dr.place("e", [ea, fe, de])
    for i in range(1, m):
        dr.place(f"alpha_{i}", [path[i], path[i - 1]])
    dr.place(last, [ca, path[m - 1], ea])
    t = 6 * m + 5
    return FamilyInstance(dr.build(), AbelianGroup(0, (t, t)), "fig5", (m,))


def build_cyclic_dipole(N: int) -> FamilyInstance:
    """Two vertices with N arcs each way, alternating; group Z_N."""
    if N < 2:
        raise ParameterError(f"N must be >= 2 (N = 1 has a two-edge cut), got {N}")
    dr = Drawing()
    dr.vertex("u", "v")
    b = dr.bundle("u", "v", N)
    dr.place("u", [b])
    dr.place("v", [b])
    return FamilyInstance(dr.build(), AbelianGroup(0, (N,)), "dipole", (N,))


BUILDERS = {
    "composites": lambda m, *a: build_composites(m, a),
    "primes": lambda p, n, *a: build_primes(p, a, n),
    "abc": build_abc,
    "fig5": build_fig5,
    "fig6": build_fig6,
    "dipole": build_cyclic_dipole,
}


def build_family(name: str, params: Sequence[int]) -> FamilyInstance:
    """Positional parameters: composites m a1..ak; primes p n a1..ak;
    abc a b c; fig5 m; fig6 m; dipole N."""
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise ParameterError(f"unknown family {name!r}; choose from {sorted(BUILDERS)}") from None
    try:
        return builder(*params)
    except TypeError as exc:
        raise ParameterError(f"wrong number of parameters for {name}: {exc}") from None


def represent_abc(t: int) -> tuple[int, int, int] | None:
    """Lexicographically least a <= b <= c with ab + ac + bc + 1 = t."""
    if t < 2:
        raise ParameterError(f"t must be >= 2, got {t}")
    n = t - 1
    for a in range(1, isqrt(n // 3) + 1):
        for b in range(a, isqrt(n) + 1):
            # c (a + b) = n - ab
            rest = n - a * b
            if rest < b * (a + b):
                break
            if rest % (a + b) == 0:
                return (a, b, rest // (a + b))
    return None


# --- reduction fixtures ---------------------------------------------------

def build_reduction_fixture(kind: str, **params) -> tuple[IntMatrix, IntMatrix]:
    """(before, after) matrices of an elementary reduction over Z.

    kind "prime+comps": p, a >= 2, x, y >= 0 and a trailing block t of m >= 2
    rows (each of length l >= 0).
    kind "121": d >= 2 and a trailing block t of x >= 1 rows of length y >= 2.
    """
    if kind == "prime+comps":
        return _fixture_prime_comps(**params)
    if kind == "121":
        return _fixture_121(**params)
    raise ParameterError(f"unknown fixture kind {kind!r}")


def _block(t, min_rows, min_cols):
    t = [list(map(int, row)) for row in t]
    if len(t) < min_rows:
        raise ParameterError(f"trailing block needs at least {min_rows} rows")
    width = len(t[0]) if t else 0
    if any(len(row) != width for row in t):
        raise ParameterError("trailing block is ragged")
    if width < min_cols:
        raise ParameterError(f"trailing block needs at least {min_cols} columns")
    return t, width


def _fixture_prime_comps(p, a, x, y, t=((), ())):
    if p < 2 or a < 2 or x < 0 or y < 0:
        raise ParameterError("need p, a >= 2 and x, y >= 0")
    t, ell = _block(t, 2, 0)
    r = p * (x + 1) + a - x - 1
    s = p * (y + 1) + a - y - 1
    ncols = x + y + 3 + ell
    z = x + y + 2  # index of the column holding s

    def row(entries, tail=()):
        out = [0] * ncols
        for j, v in entries.items():
            out[j] = v
        if tail:
            out[ncols - ell:] = list(tail)
        return out

    before = [row({0: p, 1: 1 - p, z: -1}),
              row({0: -p, 1: r, z: x + 1 - a, **{2 + i: -p for i in range(x)}})]
    before += [row({1: 1 - p, 2 + i: p, z: -1}) for i in range(x)]
    before += [row({1: -1, 2 + x + j: p, z: 1 - p}) for j in range(y)]
    before.append(row({1: y + 1 - a, z: s, **{2 + x + j: -p for j in range(y)}}, t[0]))
    before.append(row({1: -1, z: 1 - p}, t[1]))
    before += [row({}, tr) for tr in t[2:]]

    after = [row({0: 1}), row({1: a * p})]
    after += [row({2 + i: p}) for i in range(x + y)]
    after.append(row({z: p}, t[0]))
    after.append(row({z: -p}, t[1]))
    after += [row({}, tr) for tr in t[2:]]
    return IntMatrix.from_rows(before, ncols), IntMatrix.from_rows(after, ncols)


def _fixture_121(d, t=((0, 0),)):
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    t, y = _block(t, 1, 2)
    ncols = d + y - 2
    before = []
    for i in range(d - 1):
        row = [0] * ncols
        for j in range(d):
            if i == j:
                row[j] = 2
            elif abs(i - j) == 1:
                row[j] = -1
        before.append(row)
    tail = [[0] * (d - 2) + list(tr) for tr in t]
    after = []
    for i in range(d - 2):
        row = [0] * ncols
        row[i] = 1
        after.append(row)
    row = [0] * ncols
    row[d - 2], row[d - 1] = d, 1 - d
    after.append(row)
    return (IntMatrix.from_rows(before + tail, ncols),
            IntMatrix.from_rows(after + tail, ncols))


# --- planner --------------------------------------------------------------

EXCEPTIONS_ABC = (2, 3, 5, 7, 11, 19, 23, 31, 43, 59, 71, 79, 103, 131, 191, 211, 331, 463)
FIGURE_CASES = (7, 11, 19, 23, 31, 43, 59, 71, 79, 103, 131, 191, 211, 331, 463)


@dataclass(frozen=True)
class Plan:
    verdict: str  # "Construct", "NonExistent" or "Unknown"
    recipe: tuple | None = None  # (family, params)
    notes: str = ""
    instance: FamilyInstance | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "notes": self.notes}
        if self.recipe is not None:
            fam, params = self.recipe
            out["recipe"] = {"family": fam, "params": _jsonable(params)}
        if self.instance is not None:
            out["verified"] = True
            out["vertices"] = len(self.instance.digraph.vertices)
            out["arcs"] = len(self.instance.digraph.arcs)
        return out


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def smallest_prime_factor(n: int) -> int:
    for q in range(2, isqrt(n) + 1):
        if n % q == 0:
            return q
    return n


def is_prime(n: int) -> bool:
    return n >= 2 and smallest_prime_factor(n) == n


def _recipe(G: AbelianGroup) -> Plan:
    fs = G.invariant_factors
    if len(fs) == 1:
        return Plan("Construct", ("dipole", (fs[0],)), "cyclic: two vertices, N arcs each way")
    if len(fs) == 2 and fs[0] == fs[1]:
        t = fs[0]
        abc = represent_abc(t)
        if abc is not None:
            return Plan("Construct", ("abc", abc), f"{t} = ab + bc + ca + 1")
        if t == 2:
            return Plan("NonExistent", None, "Z/2 + Z/2 is never a canonical group (elementary abelian 2-group)")
        if t in (3, 5):
            return Plan("Unknown", None, f"{t} is not of the form ab + bc + ca + 1 and no construction is known")
        if t in FIGURE_CASES:
            if t % 6 == 5:
                return Plan("Construct", ("fig5", ((t - 5) // 6,)), "Z_{6m+5} + Z_{6m+5} family")
            return Plan("Construct", ("fig6", ((t - 1) // 3,)), "Z_{3m+1} + Z_{3m+1} family")
        return Plan("Unknown", None,
                    f"{t} is not of the form ab + bc + ca + 1; at most one such value beyond 463 "
                    "exists, and none exists under the generalised Riemann hypothesis")
    if all(not is_prime(d) for d in fs):
        p = smallest_prime_factor(fs[0])
        return Plan("Construct", ("composites", (p, tuple(d // p for d in fs))),
                    f"every invariant factor is composite; p = {p} divides all of them")
    p = fs[0]
    if is_prime(p):
        n = sum(1 for d in fs if d == p)
        a = tuple(d // p for d in fs[n:])
        if a and n <= 1 + 2 * sum(x - 1 for x in a):
            return Plan("Construct", ("primes", (p, a, n)),
                        f"Z_{p}^{n} plus composite parts divisible by {p}")
        if p == 2 and not a:
            return Plan("NonExistent", None, "elementary abelian 2-groups of rank >= 2 never occur")
        if not a:
            return Plan("Unknown", None, f"elementary abelian {p}-group of rank {n}: no construction known")
        return Plan("Unknown", None,
                    f"{n} copies of Z_{p} exceed the bound 1 + 2*sum(a_i - 1) = {1 + 2 * sum(x - 1 for x in a)}")
    return Plan("Unknown", None, "no construction applies")


def _execute(recipe) -> FamilyInstance:
    fam, params = recipe
    if fam == "composites":
        return build_composites(*params)
    if fam == "primes":
        return build_primes(*params)
    return BUILDERS[fam](*params)


def plan_group(G: AbelianGroup, verify: bool = True) -> Plan:
    """Decide how (or whether) G arises as a canonical group; Construct
    verdicts carry an instance whose sandpile group and embedding were checked."""
    if not G.is_finite:
        raise ValueError("canonical groups are finite; got an infinite group")
    if G.is_trivial:
        return Plan("Unknown", None, "the trivial group is outside the scope of the planner")
    plan = _recipe(G)
    if plan.verdict != "Construct":
        return plan
    inst = _execute(plan.recipe)
    if inst.expected_group != G:
        raise AssertionError(f"recipe {plan.recipe} targets {inst.expected_group}, not {G}")
    if verify:
        problems = verify_instance(inst)
        if problems:
            raise AssertionError(f"recipe {plan.recipe} failed verification: {problems}")
    return Plan(plan.verdict, plan.recipe, plan.notes, inst)


def parse_group_spec(spec: str) -> AbelianGroup:
    """'4+4' or '2^3+4' as a direct sum of cyclic groups."""
    text = spec.replace(" ", "")
    if not text:
        raise ValueError("empty group specification")
    orders = []
    for part in text.split("+"):
        base, _, rep = part.partition("^")
        try:
            n = int(base)
            k = int(rep) if rep else 1
        except ValueError:
            raise ValueError(f"cannot parse {part!r} in group specification {spec!r}") from None
        if n < 1 or k < 0:
            raise ValueError(f"bad term {part!r} in group specification {spec!r}")
        orders += [n] * k
    return group_from_cyclic_orders(orders)

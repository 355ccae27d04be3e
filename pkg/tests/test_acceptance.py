"""Acceptance criteria 1-11, each under its time limit.

Every criterion prints one PASS or FAIL line, also when output is captured.
Run alone with `pytest tests/test_acceptance.py -v`.
"""

import random
import time
from contextlib import contextmanager
from itertools import product

import pytest

from bitrade.digraph import audit, reduced_laplacian, sandpile_group
from bitrade.families import (build_abc, build_composites, build_fig5, build_fig6, build_primes,
                              build_reduction_fixture, plan_group)
from bitrade.latin import canonical_group, embed_search, enumerate_spherical_bitrades
from bitrade.surface import (bitrade_from_embedding, is_spherical_eulerian, trace_faces,
                             triangulation_from_bitrade, tutte_digraph)
from bitrade.zlinalg import (AbelianGroup, IntMatrix, cokernel, group_from_cyclic_orders,
                             smith_diagonal, snf)

from oracles import snf_diagonal_by_minors, spanning_tree_count


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, title, limit):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = elapsed < limit
            verdict = "PASS" if ok and within else "FAIL"
            with capsys.disabled():
                print(f"\n[criterion {number:>2}] {verdict} {title} ({elapsed:.2f} s, limit {limit} s)")
        assert within, f"criterion {number} took {elapsed:.2f} s, limit {limit} s"
    return run


def composite_params():
    for m in (2, 3, 4, 5):
        for k in (1, 2, 3, 4):
            for a in product((2, 3, 4), repeat=k):
                yield m, a


def prime_params():
    seqs = [a for k in (1, 2, 3, 4) for a in product((2, 3, 4, 5), repeat=k)
            if sum(x - 1 for x in a) <= 4]
    for p in (2, 3, 5):
        for a in seqs:
            for n in range(0, 2 + 2 * sum(x - 1 for x in a)):
                yield p, a, n


def abc_params():
    for a in range(1, 5):
        for b in range(a, 5):
            for c in range(b, 5):
                yield a, b, c


def test_criterion_01_composites(criterion):
    with criterion(1, "composite family groups", 10):
        count = 0
        for m, a in composite_params():
            got = sandpile_group(build_composites(m, a).digraph)
            assert got == group_from_cyclic_orders(m * x for x in a), (m, a, got)
            count += 1
        assert count == 4 * (3 + 9 + 27 + 81)


def test_criterion_02_primes(criterion):
    with criterion(2, "prime-power family groups", 30):
        count = 0
        for p, a, n in prime_params():
            got = sandpile_group(build_primes(p, a, n).digraph)
            assert got == group_from_cyclic_orders([p] * n + [p * x for x in a]), (p, a, n, got)
            count += 1
        assert count == len(list(prime_params()))


def test_criterion_03_abc(criterion):
    with criterion(3, "three-path family groups", 5):
        for a, b, c in abc_params():
            t = a * b + b * c + a * c + 1
            assert sandpile_group(build_abc(a, b, c).digraph) == AbelianGroup(0, (t, t))
        L = reduced_laplacian(build_abc(1, 1, 1).digraph, "delta")
        assert L == IntMatrix.from_rows([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]])
        assert snf(L).diagonal == [1, 4, 4]


def test_criterion_04_figures(criterion):
    with criterion(4, "figure families", 5):
        for m in range(1, 11):
            t5, t6 = 6 * m + 5, 3 * m + 1
            assert sandpile_group(build_fig5(m).digraph) == AbelianGroup(0, (t5, t5))
            assert sandpile_group(build_fig6(m).digraph) == AbelianGroup(0, (t6, t6))
        k4 = build_fig6(1).digraph
        edges = [(a.tail, a.head) for a in k4.arcs if str(a.tail) < str(a.head)]
        assert len(edges) == 6
        assert spanning_tree_count(k4.vertices, edges) == 16 == sandpile_group(k4).order


def all_instances():
    for m, a in composite_params():
        yield build_composites(m, a)
    for p, a, n in prime_params():
        yield build_primes(p, a, n)
    for a, b, c in abc_params():
        yield build_abc(a, b, c)
    for m in range(1, 11):
        yield build_fig5(m)
        yield build_fig6(m)


def test_criterion_05_connectivity_and_embedding(criterion):
    with criterion(5, "connectivity audit and spherical embedding of every instance", 120):
        count = 0
        for inst in all_instances():
            rep = audit(inst.digraph)
            assert rep.connected and not rep.has_loops, inst.label
            assert not rep.cut_vertices and not rep.two_edge_cuts, inst.label
            assert inst.embedded.alternates(), inst.label
            faces = trace_faces(inst.embedded)
            assert faces.genus == 0 and faces.all_directed, inst.label
            count += 1
        assert count == len(list(composite_params())) + len(list(prime_params())) + 20 + 20


def test_criterion_06_removed_vertex(criterion):
    with criterion(6, "sandpile group independent of the removed vertex", 60):
        rnd = random.Random(6)
        pool = list(all_instances())
        for inst in rnd.sample(pool, 20):
            D = inst.digraph
            groups = set()
            for v in D.vertices:
                L = reduced_laplacian(D, v)
                G = cokernel(L)
                assert G.is_finite and G.order == abs(L.det()), inst.label
                groups.add(G)
            assert len(groups) == 1, inst.label


def test_criterion_07_trinity_round_trip(criterion):
    with criterion(7, "trinity and round trip on spherical bitrades up to size 8", 120):
        bitrades, _ = enumerate_spherical_bitrades(8)
        assert bitrades
        for bt in bitrades:
            cw = canonical_group(bt.W).group
            cb = canonical_group(bt.B).group
            assert cw.free_rank == 2 and cw == cb
            T = triangulation_from_bitrade(bt)
            for I in "RCS":
                E = tutte_digraph(T, I)
                assert is_spherical_eulerian(E)
                assert sandpile_group(E.digraph) == cw.torsion
                _, W2, B2 = bitrade_from_embedding(E)
                assert W2 is not None
                assert canonical_group(W2).canonical == cw.torsion
                assert canonical_group(B2).canonical == cw.torsion


def test_criterion_08_no_klein_group(criterion):
    with criterion(8, "no spherical bitrade of size <= 8 has group Z/2 + Z/2", 300):
        bitrades, summary = enumerate_spherical_bitrades(8)
        assert summary.count == len(bitrades) == 11
        klein = AbelianGroup(0, (2, 2))
        for bt in bitrades:
            C = canonical_group(bt.W).canonical
            assert C != klein
            assert embed_search(bt.W, C) is not None
            assert embed_search(bt.B, C) is not None


def test_criterion_09_snf_oracle(criterion):
    with criterion(9, "Smith normal form against determinantal divisors", 30):
        rnd = random.Random(9)
        for _ in range(500):
            m, n = rnd.randint(1, 6), rnd.randint(1, 6)
            rows = [[rnd.randint(-9, 9) for _ in range(n)] for _ in range(m)]
            A = IntMatrix.from_rows(rows)
            res = snf(A)
            assert res.U @ A @ res.V == res.S
            assert res.diagonal == snf_diagonal_by_minors(rows), rows


def test_criterion_10_planner_rank_two(criterion):
    with criterion(10, "planner on every Z/d1 + Z/d2 with d1 | d2 <= 20", 120):
        verdicts = {}
        for d2 in range(2, 21):
            for d1 in range(2, d2 + 1):
                if d2 % d1:
                    continue
                G = AbelianGroup(0, (d1, d2))
                plan = plan_group(G)
                verdicts[(d1, d2)] = plan.verdict
                if plan.verdict == "Construct":
                    assert plan.instance is not None
                    assert sandpile_group(plan.instance.digraph) == G
                    assert is_spherical_eulerian(plan.instance.embedded)
                    assert audit(plan.instance.digraph).prop_simple_ok
        others = {k: v for k, v in verdicts.items() if v != "Construct"}
        assert others == {(2, 2): "NonExistent", (3, 3): "Unknown", (5, 5): "Unknown"}


def test_criterion_11_reduction_fixtures(criterion):
    with criterion(11, "reduction fixtures preserve the Smith form", 30):
        rnd = random.Random(11)
        count = 0
        for p, a, x, y in product((2, 3, 4), (2, 3, 4), (0, 1, 2), (0, 1, 2)):
            for _ in range(2):
                rows, ell = rnd.randint(2, 3), rnd.randint(0, 2)
                t = [[rnd.randint(-5, 5) for _ in range(ell)] for _ in range(rows)]
                before, after = build_reduction_fixture("prime+comps", p=p, a=a, x=x, y=y, t=t)
                assert smith_diagonal(before) == smith_diagonal(after), (p, a, x, y, t)
                count += 1
        for d in range(2, 7):
            for _ in range(6):
                rows, width = rnd.randint(1, 3), rnd.randint(2, 3)
                t = [[rnd.randint(-5, 5) for _ in range(width)] for _ in range(rows)]
                before, after = build_reduction_fixture("121", d=d, t=t)
                assert smith_diagonal(before) == smith_diagonal(after), (d, t)
                count += 1
        assert count == 81 * 2 + 30

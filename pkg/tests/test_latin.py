import random

import pytest
from hypothesis import given, settings, strategies as st

from bitrade.latin import (INTERCALATE, Embedding, InvalidBitrade, LatinBitrade, NotConnectedBitrade,
                           NotLatin, NotSeparated, PartialLatinSquare, apply_main_class,
                           apply_main_class_bitrade, bitrade_genus, canonical_group, connectedness,
                           embed_search, enumerate_spherical_bitrades, is_embedding, is_spherical,
                           normal_form, separate, separation, validate_bitrade)
from bitrade.zlinalg import AbelianGroup

from oracles import bitrades_by_cells
from samples import DISJOINT, SHARED_ROW, TORUS

Z2 = AbelianGroup(0, (2,))


@pytest.fixture(scope="module")
def enumerated():
    return enumerate_spherical_bitrades(9)


def test_partial_latin_square_rejects_clash():
    with pytest.raises(NotLatin):
        PartialLatinSquare.of([(0, 0, 0), (0, 0, 1)])
    with pytest.raises(NotLatin):
        PartialLatinSquare.of([(0, 0, 0), (0, 1, 0)])


def test_validate_examples():
    assert validate_bitrade(INTERCALATE.W, INTERCALATE.B)
    check = validate_bitrade(INTERCALATE.W, INTERCALATE.W)
    assert not check and check.problems
    assert not validate_bitrade([(0, 0, 0)], [(0, 0, 1)])
    with pytest.raises(InvalidBitrade):
        LatinBitrade.of([(0, 0, 0)], [(0, 0, 1)])


def test_separation_examples():
    assert separation(INTERCALATE).separated
    assert separate(INTERCALATE) is INTERCALATE
    rep = separation(SHARED_ROW)
    assert not rep.separated
    assert len(rep.rows[0]) == 2
    split = separate(SHARED_ROW)
    assert separation(split).separated
    assert len(split.labels(0)) == 4 and 0 not in split.labels(0)
    assert validate_bitrade(split.W, split.B)


def test_genus_requires_separation():
    with pytest.raises(NotSeparated):
        bitrade_genus(SHARED_ROW)
    with pytest.raises(NotConnectedBitrade):
        bitrade_genus(DISJOINT)
    assert not is_spherical(SHARED_ROW)


def test_connectedness_examples():
    assert connectedness(INTERCALATE)
    assert not connectedness(DISJOINT)
    assert not connectedness(SHARED_ROW)
    assert connectedness(TORUS)


def test_genus_examples():
    assert bitrade_genus(INTERCALATE) == 0
    assert TORUS.vertex_count == 9 and TORUS.size == 9
    assert bitrade_genus(TORUS) == 1
    assert not is_spherical(TORUS)


def test_canonical_group_examples():
    pres = canonical_group(INTERCALATE.W)
    assert pres.group == AbelianGroup(2, (2,))
    assert pres.relation_matrix.rows == 4 and pres.relation_matrix.cols == 6
    assert all(sum(r) == 3 and set(r) <= {0, 1} for r in pres.relation_matrix.to_rows())
    assert canonical_group([(0, 0, 0)]).group == AbelianGroup(2, ())
    assert canonical_group(TORUS.W).group == AbelianGroup(2, (3,))


def test_main_class_examples():
    P = INTERCALATE.W
    assert apply_main_class(P) == P
    Q = apply_main_class(P, roles=(1, 0, 2))
    assert Q == P
    assert canonical_group(Q).canonical == Z2
    with pytest.raises(ValueError):
        apply_main_class(P, relabel=({0: "x", 1: "x"}, None, None))
    with pytest.raises(ValueError):
        apply_main_class(P, roles=(0, 0, 1))


FIGURE_SQUARE = PartialLatinSquare.of([
    (0, 0, "a"), (0, 1, "b"), (0, 2, "c"),
    (1, 0, "c"), (1, 2, "a"),
    (2, 1, "a"), (2, 2, "b"),
])


def test_figure_square_embeds_in_z4():
    Z4 = AbelianGroup(0, (4,))
    bold = Embedding(Z4, {0: (0,), 1: (2,), 2: (3,)}, {0: (1,), 1: (2,), 2: (3,)},
                     {"a": (1,), "b": (2,), "c": (3,)})
    assert is_embedding(FIGURE_SQUARE, bold)
    found = embed_search(FIGURE_SQUARE, Z4)
    assert found is not None and is_embedding(FIGURE_SQUARE, found)
    assert embed_search(FIGURE_SQUARE, AbelianGroup(0, (2,))) is None


def test_embed_search_intercalate():
    emb = embed_search(INTERCALATE.W, Z2)
    assert emb is not None and is_embedding(INTERCALATE.W, emb)
    assert embed_search(INTERCALATE.W, AbelianGroup()) is None
    with pytest.raises(ValueError):
        embed_search(INTERCALATE.W, AbelianGroup(1, ()))


def test_enumeration_summary(enumerated):
    bitrades, summary = enumerated
    assert summary.by_size == {4: 1, 6: 3, 7: 1, 8: 6, 9: 9}
    assert summary.groups == {"Z/2": 1, "Z/3": 3, "Z/4": 4, "Z/5": 3, "Z/6": 6, "Z/7": 3}
    assert normal_form(bitrades[0]) == normal_form(INTERCALATE)
    assert canonical_group(bitrades[0].W).canonical == Z2


def test_enumeration_bound():
    with pytest.raises(ValueError):
        enumerate_spherical_bitrades(10)
    assert enumerate_spherical_bitrades(3)[0] == []


@pytest.mark.parametrize("size", [4, 5, 6, 7, 8, 9])
def test_enumeration_matches_bruteforce(enumerated, size):
    want = set()
    for W, B in bitrades_by_cells(size):
        bt = LatinBitrade.of(W, B)
        if connectedness(bt) and separation(bt).separated and bitrade_genus(bt) == 0:
            want.add(normal_form(bt))
    got = [normal_form(bt) for bt in enumerated[0] if bt.size == size]
    assert len(got) == len(set(got)), "duplicate normal forms"
    assert set(got) == want


def test_enumeration_properties(enumerated):
    klein = AbelianGroup(0, (2, 2))
    for bt in enumerated[0]:
        assert validate_bitrade(bt.W, bt.B)
        assert connectedness(bt) and separation(bt).separated
        assert bt.vertex_count == bt.size + 2
        gw, gb = canonical_group(bt.W).group, canonical_group(bt.B).group
        assert gw.free_rank == 2 and gw == gb
        assert gw.torsion != klein
        assert separate(bt) is bt


def test_enumeration_deterministic(enumerated):
    again, summary = enumerate_spherical_bitrades(9)
    assert [b.key() for b in again] == [b.key() for b in enumerated[0]]
    assert summary.to_json() == enumerated[1].to_json()


def random_relabeling(bt, rnd):
    maps = []
    for k in range(3):
        labels = bt.labels(k)
        image = [f"x{k}_{i}" for i in range(len(labels))]
        rnd.shuffle(image)
        maps.append(dict(zip(labels, image)))
    roles = [0, 1, 2]
    rnd.shuffle(roles)
    return roles, maps


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 19), st.randoms(use_true_random=False))
def test_main_class_invariance(enumerated, index, rnd):
    bt = enumerated[0][index]
    roles, maps = random_relabeling(bt, rnd)
    image = apply_main_class_bitrade(bt, roles, maps)
    assert canonical_group(image.W).group == canonical_group(bt.W).group
    assert bitrade_genus(image) == 0
    if roles == [0, 1, 2]:
        assert normal_form(image) == normal_form(bt)


def test_embeddings_into_canonical_group(enumerated):
    for bt in enumerated[0]:
        C = canonical_group(bt.W).canonical
        for P in (bt.W, bt.B):
            emb = embed_search(P, C)
            assert emb is not None and is_embedding(P, emb)


def test_separate_is_idempotent():
    rnd = random.Random(7)
    once = separate(SHARED_ROW)
    assert separate(once) is once
    roles, maps = random_relabeling(SHARED_ROW, rnd)
    assert not separation(apply_main_class_bitrade(SHARED_ROW, roles, maps)).separated

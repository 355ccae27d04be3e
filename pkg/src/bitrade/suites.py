"""Verification suites shared by the command line and the test-suite."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .digraph import sandpile_group
from .families import (build_abc, build_composites, build_cyclic_dipole, build_fig5,
                       build_fig6, build_primes, is_prime, verify_instance)
from .latin import LatinBitrade, canonical_group, embed_search, enumerate_spherical_bitrades
from .surface import bitrade_from_embedding, triangulation_from_bitrade, tutte_digraph
from .zlinalg import AbelianGroup

SUITES = ("families", "trinity", "roundtrip", "enumerate")


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


def family_instances(limit: int):
    """Every family instance with parameters up to `limit` (at most two a_i)."""
    seqs = [a for k in (1, 2) for a in product(range(2, limit + 1), repeat=k)]
    for m in range(2, limit + 1):
        for a in seqs:
            yield build_composites(m, a)
    for p in range(2, limit + 1):
        if not is_prime(p):
            continue
        for a in seqs:
            for n in range(1, 2 + 2 * sum(x - 1 for x in a)):
                yield build_primes(p, a, n)
    for a in range(1, limit + 1):
        for b in range(a, limit + 1):
            for c in range(b, limit + 1):
                yield build_abc(a, b, c)
    for m in range(1, limit + 1):
        yield build_fig5(m)
        yield build_fig6(m)
    for N in range(2, limit + 1):
        yield build_cyclic_dipole(N)


def suite_families(limit: int) -> list[Check]:
    out = []
    for inst in family_instances(limit):
        problems = verify_instance(inst)
        out.append(Check(inst.label, not problems, "; ".join(problems) or str(inst.expected_group)))
    return out


def _label(i: int, bt: LatinBitrade) -> str:
    return f"bitrade#{i}(size {bt.size})"


def trinity_check(bt: LatinBitrade) -> tuple[bool, str]:
    T = triangulation_from_bitrade(bt)
    groups = {"A_W": canonical_group(bt.W).canonical, "A_B": canonical_group(bt.B).canonical}
    for I in "RCS":
        groups[f"S(D_{I})"] = sandpile_group(tutte_digraph(T, I).digraph)
    ok = len(set(groups.values())) == 1
    return ok, ", ".join(f"{k}={v}" for k, v in groups.items())


def roundtrip_check(bt: LatinBitrade) -> tuple[bool, str]:
    T = triangulation_from_bitrade(bt)
    want = canonical_group(bt.W).canonical
    notes = []
    ok = True
    for I in "RCS":
        E = tutte_digraph(T, I)
        _, W2, B2 = bitrade_from_embedding(E)
        if W2 is None:
            ok = False
            notes.append(f"{I}: triangulation not simple")
            continue
        got = canonical_group(W2).canonical
        ok &= got == want and canonical_group(B2).canonical == want
        notes.append(f"{I}: {got}")
    return ok, ", ".join(notes)


def suite_trinity(limit: int) -> list[Check]:
    bitrades, _ = enumerate_spherical_bitrades(limit)
    return [Check(_label(i, bt), *trinity_check(bt)) for i, bt in enumerate(bitrades)]


def suite_roundtrip(limit: int) -> list[Check]:
    bitrades, _ = enumerate_spherical_bitrades(limit)
    return [Check(_label(i, bt), *roundtrip_check(bt)) for i, bt in enumerate(bitrades)]


def suite_enumerate(limit: int) -> list[Check]:
    bitrades, summary = enumerate_spherical_bitrades(limit)
    klein = AbelianGroup(0, (2, 2))
    out = []
    hits = [i for i, bt in enumerate(bitrades) if canonical_group(bt.W).canonical == klein]
    out.append(Check("no Z/2+Z/2 found", not hits,
                     f"{summary.count} normalized forms; groups {summary.groups}"))
    for i, bt in enumerate(bitrades):
        C = canonical_group(bt.W).canonical
        w_ok = embed_search(bt.W, C) is not None
        b_ok = embed_search(bt.B, C) is not None
        out.append(Check(f"{_label(i, bt)} embeds in {C}", w_ok and b_ok,
                         f"W {'ok' if w_ok else 'fails'}, B {'ok' if b_ok else 'fails'}"))
    return out


def run_suite(name: str, limit: int | None = None) -> list[Check]:
    if name == "families":
        return suite_families(4 if limit is None else limit)
    if name == "trinity":
        return suite_trinity(8 if limit is None else limit)
    if name == "roundtrip":
        return suite_roundtrip(8 if limit is None else limit)
    if name == "enumerate":
        return suite_enumerate(8 if limit is None else limit)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")

import math

import pytest

from nestkit.bounds import strong_lower_bound, weak_lower_bound
from nestkit.core import NestingError, develop
from nestkit.direct import (
    FIXTURE_NAMES,
    cyclic_sts,
    difference_triples,
    fixture,
    nest_cyclic_orbits,
    orbit_lengths,
    strong_nest_pairs_1mod4,
    weak_nest_pairs,
)
from nestkit.verify import verify_bibd, verify_strong_nesting, verify_weak_nesting


def test_weak_pairs_all_residues_meet_bound():
    for v in range(4, 61):
        design, nesting = weak_nest_pairs(v)
        assert design.v == v and design.k == 2 and design.lam == 1
        assert len(design.blocks) == v * (v - 1) // 2
        cert = verify_weak_nesting(design, nesting)
        assert cert.ok, (v, cert.first_failure())
        assert nesting.w == math.ceil((5 * v - 1) / 4)
        assert nesting.w == weak_lower_bound(v, 2, 1)


def test_weak_pairs_worked_sizes():
    assert weak_nest_pairs(5)[1].w == 6
    assert weak_nest_pairs(7)[1].w == 9
    assert weak_nest_pairs(8)[1].w == 10


def test_weak_pairs_too_small():
    with pytest.raises(NestingError) as exc:
        weak_nest_pairs(3)
    assert exc.value.code == "V_TOO_SMALL"


def test_strong_pairs_1mod4():
    for v in (5, 9, 13, 17, 29, 41):
        design, nesting = strong_nest_pairs_1mod4(v)
        cert = verify_strong_nesting(design, nesting)
        assert cert.ok, (v, cert.first_failure())
        assert nesting.w == (3 * v + 1) // 2
        assert nesting.w == strong_lower_bound(v, 2, 1)


def test_strong_pairs_domain():
    with pytest.raises(NestingError) as exc:
        strong_nest_pairs_1mod4(7)
    assert exc.value.code == "UNSUPPORTED_CASE"
    with pytest.raises(NestingError) as exc:
        strong_nest_pairs_1mod4(1)
    assert exc.value.code == "V_TOO_SMALL"


def test_difference_triples_small():
    assert difference_triples(7) == ((1, 2, 3),)
    assert difference_triples(9) is None
    for v in (13, 15, 19, 21, 25, 27, 31, 33, 37, 43):
        triples = difference_triples(v)
        assert triples is not None
        covered = sorted(x for t in triples for x in t)
        expect = [d for d in range(1, (v - 1) // 2 + 1) if not (v % 3 == 0 and d == v // 3)]
        assert covered == expect
        for a, b, c in triples:
            assert a + b == c or a + b + c == v


def test_cyclic_sts_designs_verify():
    for v in (7, 13, 15, 19, 21, 25, 31, 37):
        system = cyclic_sts(v)
        design, nesting = develop(system)
        assert nesting is None
        cert = verify_bibd(design)
        assert cert.ok, (v, cert.first_failure())
        assert design.lam == 1 and design.k == 3
        if v % 6 == 3:
            assert orbit_lengths(system)[-1] == v // 3


def test_cyclic_sts_refusals():
    for v in (9, 11, 6, 8):
        with pytest.raises(NestingError) as exc:
            cyclic_sts(v)
        assert exc.value.code == "NO_CYCLIC_STS"


def test_nest_cyclic_orbits_shape():
    system = cyclic_sts(15)
    nesting = nest_cyclic_orbits(system)
    # two full orbits and one short orbit: three fresh points
    assert nesting.w == 18
    assert nesting.v == 15
    assert nesting.assignment == (15,) * 15 + (16,) * 15 + (17,) * 5
    design, _ = develop(system)
    assert len(design.blocks) == len(nesting.assignment) == 35


def test_fixture_loading_and_claims():
    assert len(FIXTURE_NAMES) == 15
    for name in FIXTURE_NAMES:
        rec = fixture(name)
        assert rec.name == name
        assert rec.nesting.w == rec.w
        verifier = verify_strong_nesting if rec.mode == "STRONG" else verify_weak_nesting
        cert = verifier(rec.design, rec.nesting)
        assert cert.ok, (name, cert.first_failure())


def test_fixture_expected_ws():
    expected = {
        "E4": 5, "E4strong": 7, "E1": 6, "E2": 11, "E3": 16,
        "E7": 8, "E9": 11, "E6": 7, "E12": 14, "E10": 12,
        "E9strong": 14, "E7strong": 11, "strongE6": 11,
        "E12strong": 18, "E10strong": 16,
    }
    for name, w in expected.items():
        assert fixture(name).w == w


def test_unknown_fixture():
    with pytest.raises(NestingError) as exc:
        fixture("E99")
    assert exc.value.code == "UNKNOWN_FIXTURE"


def test_weak_fixture_that_is_not_strong():
    rec = fixture("E4")
    cert = verify_strong_nesting(rec.design, rec.nesting)
    assert not cert.ok
    failure = cert.first_failure()
    assert failure.name == "nested-pairs-distinct"
    assert failure.witness["pair"] == [0, 4]

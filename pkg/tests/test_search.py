import pytest

from helpers import ag23, design_432, sts7
from nestkit.bounds import check_optimal, strong_lower_bound, weak_lower_bound
from nestkit.core import BaseBlock, BaseBlockSystem, NestingError, develop
from nestkit.direct import cyclic_sts, weak_nest_pairs
from nestkit.search import (
    Exhausted,
    certified_632_floor,
    certify_632_strong_bound,
    find_min_nesting,
    nest_cyclic_base,
    no_disjoint_blocks,
)
from nestkit.verify import classify, verify_strong_nesting, verify_weak_nesting


def test_432_minimal_exhausts_at_v():
    assert find_min_nesting(design_432(), "MINIMAL", w_cap=4) == Exhausted(4)


def test_432_weak_minimum_is_five():
    nesting = find_min_nesting(design_432(), "WEAK", w_cap=8)
    assert nesting.w == 5
    assert verify_weak_nesting(design_432(), nesting).ok
    assert nesting.w == weak_lower_bound(4, 3, 2)


def test_432_strong_minimum_is_seven():
    d = design_432()
    assert find_min_nesting(d, "STRONG", w_cap=6) == Exhausted(6)
    nesting = find_min_nesting(d, "STRONG", w_cap=9)
    assert nesting.w == 7
    assert verify_strong_nesting(d, nesting).ok
    assert nesting.w == strong_lower_bound(4, 3, 2)


def test_exhaustion_is_monotone():
    d = design_432()
    for cap in (4, 5, 6):
        assert find_min_nesting(d, "STRONG", w_cap=cap) == Exhausted(cap)
    for cap in (3, 4):
        assert find_min_nesting(d, "WEAK", w_cap=cap) == Exhausted(cap)


def test_search_finds_perfect_sts7_nesting():
    d = sts7()
    nesting = find_min_nesting(d, "MINIMAL", w_cap=7)
    assert not isinstance(nesting, Exhausted)
    cert = classify(d, nesting)
    assert cert.ok
    assert set(cert.classification) == {"WEAK", "STRONG", "MINIMAL", "PERFECT"}


def test_pairs_search_meets_table_minima():
    d5, _ = weak_nest_pairs(5)
    weak = find_min_nesting(d5, "WEAK", w_cap=8)
    assert weak.w == 6 == weak_lower_bound(5, 2, 1)
    strong = find_min_nesting(d5, "STRONG", w_cap=9)
    assert strong.w == 8 == strong_lower_bound(5, 2, 1)


def test_threads_do_not_change_output():
    d = design_432()
    for mode, cap in [("WEAK", 8), ("STRONG", 9)]:
        seq = find_min_nesting(d, mode, w_cap=cap, threads=1)
        par = find_min_nesting(d, mode, w_cap=cap, threads=4)
        assert seq == par
    d7 = sts7()
    assert find_min_nesting(d7, "MINIMAL", 7, threads=1) == find_min_nesting(
        d7, "MINIMAL", 7, threads=3
    )


def test_symmetry_breaking_preserves_the_minimum():
    # reference run without the interchangeability cut on small instances
    for d, mode, cap in [
        (design_432(), "WEAK", 8),
        (design_432(), "STRONG", 9),
        (sts7(), "MINIMAL", 7),
    ]:
        with_sb = find_min_nesting(d, mode, cap, symmetry_breaking=True)
        without = find_min_nesting(d, mode, cap, symmetry_breaking=False)
        assert with_sb.w == without.w
        verifier = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
        assert verifier(d, without).ok


def test_mode_validation():
    with pytest.raises(ValueError):
        find_min_nesting(design_432(), "PERFECT", w_cap=9)


def test_no_disjoint_blocks():
    assert no_disjoint_blocks(sts7())  # any two lines of the plane meet
    assert not no_disjoint_blocks(ag23())  # parallel classes exist


def test_certify_632():
    cert = certify_632_strong_bound()
    assert cert.ok
    assert cert.bound == {"mode": "STRONG", "lower": 11, "source": "exhaustive search"}
    names = [c.name for c in cert.checks]
    assert names == [
        "unique-design-up-to-isomorphism",
        "no-disjoint-blocks",
        "strong-exhausted-to-cap",
    ]
    assert all(c.ok for c in cert.checks)
    assert certified_632_floor() == 11


def test_check_optimal_uses_certified_632_floor():
    from nestkit.verify import Certificate

    cert = Certificate(kind="strong-nesting", ok=True, checks=(), w=11, params=(6, 3, 2))
    out = check_optimal(cert, "STRONG")
    assert out.bound["lower"] == 11
    assert out.bound["met"] is True
    assert out.bound["source"] == "exhaustive search certificate"
    # a weak claim for the same parameters still uses the formula
    weak = Certificate(kind="weak-nesting", ok=True, checks=(), w=7, params=(6, 3, 2))
    assert check_optimal(weak, "WEAK").bound["lower"] == 7


def test_nest_cyclic_base_examples():
    found = nest_cyclic_base(BaseBlockSystem(modulus=7, bases=(BaseBlock((1, 2, 4)),)))
    assert found is not None
    assert found.bases[0].nest == 0

    nested13 = nest_cyclic_base(cyclic_sts(13))
    d, n = develop(nested13)
    assert "PERFECT" in classify(d, n).classification

    # a short orbit forces a fresh point, so no minimal nesting exists
    assert nest_cyclic_base(cyclic_sts(15), mode="MINIMAL") is None


def test_nest_cyclic_base_rejects_fixed_points():
    system = BaseBlockSystem(
        modulus=5, bases=(BaseBlock(("∞", 0, 1)),), fixed_old=("∞",)
    )
    with pytest.raises(ValueError):
        nest_cyclic_base(system)


def test_search_result_never_beats_the_bound():
    for v in (5, 6):
        d, _ = weak_nest_pairs(v)
        res = find_min_nesting(d, "WEAK", w_cap=weak_lower_bound(v, 2, 1))
        if not isinstance(res, Exhausted):
            assert res.w >= weak_lower_bound(v, 2, 1)

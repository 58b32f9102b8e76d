"""Bulk randomized invariants, deliberately counted: 5000 pair-count
permutation checks, 4000 serialization round trips, 1000 search
determinism comparisons — ten thousand in all.  Everything is seeded,
so a failure reproduces exactly.  A few hypothesis properties shadow
the bulk loops with adversarial shrinking on top.
"""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ag23, design_432, sts7
from nestkit.core import Design, as_block, pair_counts
from nestkit.direct import fixture, weak_nest_pairs
from nestkit.formats import (
    design_from_dict,
    design_to_dict,
    dumps_bytes,
    certificate_from_dict,
    certificate_to_dict,
    nesting_from_dict,
    nesting_to_dict,
)
from nestkit.levi import (
    colouring_from_dict,
    colouring_to_dict,
    nesting_to_colouring,
)
from nestkit.search import find_min_nesting
from nestkit.verify import classify

PAIR_CHECKS = 5000
ROUND_TRIPS = 4000
DETERMINISM_RUNS = 1000


# ------------------------------------------- pair-count permutation invariance


def test_pair_counts_are_permutation_invariant_bulk():
    rng = random.Random(20260814)
    for _ in range(PAIR_CHECKS):
        w = rng.randint(4, 14)
        blocks = []
        for _ in range(rng.randint(1, 10)):
            size = rng.randint(2, min(4, w))
            blocks.append(as_block(rng.sample(range(w), size)))
        perm = list(range(w))
        rng.shuffle(perm)
        moved = [as_block(perm[x] for x in b) for b in blocks]
        base = pair_counts(blocks, w)
        image = pair_counts(moved, w)
        assert base.total() == image.total()
        for _ in range(4):
            x, y = rng.sample(range(w), 2)
            assert base.get(x, y) == image.get(perm[x], perm[y])


@given(st.data())
@settings(max_examples=120, deadline=None)
def test_pair_counts_permutation_invariance_property(data):
    w = data.draw(st.integers(4, 10))
    blocks = data.draw(
        st.lists(
            st.sets(st.integers(0, w - 1), min_size=2, max_size=3).map(
                lambda s: as_block(s)
            ),
            min_size=1,
            max_size=6,
        )
    )
    perm = data.draw(st.permutations(range(w)))
    base = pair_counts(blocks, w)
    image = pair_counts([as_block(perm[x] for x in b) for b in blocks], w)
    for x in range(w):
        for y in range(x + 1, w):
            assert base.get(x, y) == image.get(perm[x], perm[y])


# ------------------------------------------------- serialization round trips


def _artifact_pool():
    pool = []
    for name in ("E4", "E4strong", "E7", "E9", "E10strong", "E12", "strongE6"):
        rec = fixture(name)
        pool.append(("design", rec.design))
        pool.append(("nesting", rec.nesting))
        pool.append(("certificate", classify(rec.design, rec.nesting)))
        if rec.mode == "STRONG":
            pool.append(("colouring", nesting_to_colouring(rec.design, rec.nesting)))
    for v in (5, 8, 12, 21):
        d, n = weak_nest_pairs(v)
        pool.append(("design", d))
        pool.append(("nesting", n))
    pool.append(("design", ag23()))
    return pool


_CASTS = {
    "design": (design_to_dict, design_from_dict),
    "nesting": (nesting_to_dict, nesting_from_dict),
    "certificate": (certificate_to_dict, certificate_from_dict),
    "colouring": (colouring_to_dict, colouring_from_dict),
}


def test_serialization_round_trips_bulk():
    rng = random.Random(977)
    pool = _artifact_pool()
    for _ in range(ROUND_TRIPS):
        kind, obj = rng.choice(pool)
        if (
            kind == "design"
            and obj.resolution is None
            and obj.groups is None
            and rng.random() < 0.5
        ):
            # block order is content, not presentation: it must survive
            blocks = list(obj.blocks)
            rng.shuffle(blocks)
            obj = Design(obj.params, obj.universe, tuple(blocks))
        to_dict, from_dict = _CASTS[kind]
        once = to_dict(obj)
        back = from_dict(once)
        assert back == obj
        assert dumps_bytes(to_dict(back)) == dumps_bytes(once)


@given(st.sampled_from(_artifact_pool()))
@settings(max_examples=60, deadline=None)
def test_serialization_round_trip_property(item):
    kind, obj = item
    to_dict, from_dict = _CASTS[kind]
    assert from_dict(to_dict(obj)) == obj


# ------------------------------------------------------ search determinism


def test_search_is_thread_count_invariant_bulk():
    cases = [
        (design_432(), "WEAK", 5),
        (design_432(), "WEAK", 6),
        (design_432(), "STRONG", 6),
        (design_432(), "STRONG", 7),
        (design_432(), "MINIMAL", 4),
        (sts7(), "MINIMAL", 7),
        (sts7(), "WEAK", 7),
        (ag23(with_resolution=False), "WEAK", 10),
        (ag23(with_resolution=False), "MINIMAL", 9),
    ]
    reference = [
        find_min_nesting(d, mode, w_cap=cap, threads=1) for d, mode, cap in cases
    ]
    rng = random.Random(4451)
    for i in range(DETERMINISM_RUNS):
        j = i % len(cases)
        design, mode, cap = cases[j]
        threads = rng.choice((1, 2, 3, 4))
        result = find_min_nesting(design, mode, w_cap=cap, threads=threads)
        assert result == reference[j]

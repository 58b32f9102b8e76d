"""Independent checkers for designs, nestings, and resolutions.

Every construction in the package is rechecked here from raw blocks;
nothing trusts construction metadata.  All checkers return PASS/FAIL
results rather than raising (except for misuse of the API itself, which
is a ValueError): a FAIL carries a minimal witness, the first violating
pair or class in canonical order, so failures diff cleanly.

The classification checker also cross-validates the parameter
equivalences that hold for minimal nestings (augmented design complete
iff k = 2*lam+1 iff v = 2r+1) and flags any disagreement, which would
indicate a broken checker rather than a broken design.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from nestkit.core import Design, Nesting, NestingError, augment, pair_counts

__all__ = [
    "Check",
    "Certificate",
    "verify_bibd",
    "verify_partial",
    "verify_gdd",
    "verify_resolution",
    "verify_weak_nesting",
    "verify_strong_nesting",
    "classify",
]


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    witness: object = None

    def as_dict(self) -> dict:
        out: dict = {"name": self.name, "ok": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class Certificate:
    """Verification report: named checks plus summary fields.

    ``classification`` is filled by classify(); ``bound`` is attached by
    the bounds module when optimality is assessed; ``subject`` binds the
    report to content hashes when serialized.
    """

    kind: str
    ok: bool
    checks: tuple[Check, ...]
    w: int | None = None
    params: tuple[int, int, int] | None = None
    classification: tuple[str, ...] = ()
    bound: dict | None = None
    subject: dict | None = None
    notes: tuple[str, ...] = ()

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.ok:
                return c
        return None


def _pair_at(w: int, flat: int) -> tuple[int, int]:
    """Inverse of the condensed pair index: flat -> (x, y) with x < y."""
    x = 0
    while (x + 1) * (2 * w - x - 2) // 2 <= flat:
        x += 1
    y = flat - x * (2 * w - x - 1) // 2 + x + 1
    return x, y


def _first_mismatch(
    counts: np.ndarray, expected: np.ndarray, w: int
) -> tuple[int, int, int, int] | None:
    """First pair (lex order) whose count differs: (x, y, got, want)."""
    bad = np.nonzero(counts != expected)[0]
    if bad.size == 0:
        return None
    flat = int(bad[0])
    x, y = _pair_at(w, flat)
    return x, y, int(counts[flat]), int(expected[flat])


def _pair_witness(design_labels: Sequence[str] | None, x: int, y: int) -> dict:
    out: dict = {"pair": [x, y]}
    if design_labels is not None:
        out["labels"] = [design_labels[x], design_labels[y]]
    return out


def verify_bibd(design: Design) -> Certificate:
    """Check that the design is exactly a (v,k,lambda)-BIBD."""
    if design.groups is not None:
        raise ValueError("verify_bibd expects an ungrouped design; use verify_gdd")
    p = design.params
    labels = design.universe.all_labels()
    checks: list[Check] = []

    checks.append(
        Check(
            "params-admissible",
            p.admissible(),
            None if p.admissible() else {"r": str(p.r_exact), "b": str(p.b_exact)},
        )
    )
    blocks_arr = design.blocks_array()
    sizes_ok = blocks_arr.shape[1] == p.k or not design.blocks
    checks.append(Check("block-sizes", sizes_ok))

    if p.admissible():
        checks.append(
            Check(
                "block-count",
                len(design.blocks) == p.b,
                None
                if len(design.blocks) == p.b
                else {"got": len(design.blocks), "want": p.b},
            )
        )
        degree = np.bincount(blocks_arr.ravel(), minlength=p.v)
        rep_bad = np.nonzero(degree != p.r)[0]
        checks.append(
            Check(
                "replication",
                rep_bad.size == 0,
                None
                if rep_bad.size == 0
                else {"point": int(rep_bad[0]), "got": int(degree[rep_bad[0]]), "want": p.r},
            )
        )

    table = pair_counts(blocks_arr, p.v)
    expected = np.full(p.v * (p.v - 1) // 2, p.lam, dtype=np.int64)
    mismatch = _first_mismatch(table.counts, expected, p.v)
    witness = None
    if mismatch is not None:
        x, y, got, want = mismatch
        witness = _pair_witness(labels, x, y) | {"count": got, "expected": want}
    checks.append(Check("pair-balance", mismatch is None, witness))

    ok = all(c.ok for c in checks)
    return Certificate("bibd", ok, tuple(checks), w=p.v, params=(p.v, p.k, p.lam))


def verify_partial(
    blocks: Iterable[tuple[int, ...]], w: int, lambda_cap: int
) -> Check:
    """Check every pair multiplicity is at most lambda_cap."""
    table = pair_counts(blocks, w)
    over = np.nonzero(table.counts > lambda_cap)[0]
    if over.size == 0:
        return Check("pair-cap", True)
    flat = int(over[0])
    x, y = _pair_at(w, flat)
    return Check(
        "pair-cap",
        False,
        {"pair": [x, y], "count": int(table.counts[flat]), "cap": lambda_cap},
    )


def verify_gdd(design: Design) -> Certificate:
    """Check the group-divisible property: cross pairs exactly lambda,
    within-group pairs zero, blocks meeting each group at most once."""
    if design.groups is None:
        raise ValueError("verify_gdd needs groups")
    p = design.params
    labels = design.universe.all_labels()
    group_of = design.group_of()
    assert group_of is not None
    checks: list[Check] = []

    sizes_ok = all(len(b) == p.k for b in design.blocks)
    checks.append(Check("block-sizes", sizes_ok))

    meet_witness = None
    for i, block in enumerate(design.blocks):
        gs = [group_of[x] for x in block]
        if len(set(gs)) != len(gs):
            meet_witness = {"block": i, "points": list(block)}
            break
    checks.append(Check("block-meets-group-at-most-once", meet_witness is None, meet_witness))

    table = pair_counts(design.blocks, p.v)
    xs, ys = np.triu_indices(p.v, k=1)
    garr = np.zeros(p.v, dtype=np.int64)
    for x, g in group_of.items():
        garr[x] = g
    cross = garr[xs] != garr[ys]
    expected = np.where(cross, p.lam, 0).astype(np.int64)
    mismatch = _first_mismatch(table.counts, expected, p.v)
    witness = None
    if mismatch is not None:
        x, y, got, want = mismatch
        witness = _pair_witness(labels, x, y) | {"count": got, "expected": want}
    checks.append(Check("group-divisible-pair-balance", mismatch is None, witness))

    ok = all(c.ok for c in checks)
    return Certificate("gdd", ok, tuple(checks), w=p.v, params=(p.v, p.k, p.lam))


def verify_resolution(design: Design) -> Check:
    """Check the resolution: full classes partition all points, holey
    classes partition everything off their hole, and all-holey
    resolutions additionally satisfy the frame census (|G|/2 classes
    per group, |X|/2 classes in total)."""
    if design.resolution is None:
        raise ValueError("design has no resolution to verify")
    res = design.resolution
    v = design.v
    for ci, cls in enumerate(res.classes):
        covered: list[int] = []
        for bi in cls.blocks:
            covered.extend(design.blocks[bi])
        if cls.hole is None:
            want = set(range(v))
        else:
            assert design.groups is not None
            want = set(range(v)) - set(design.groups[cls.hole])
        if len(covered) != len(want) or set(covered) != want:
            return Check(
                "resolution",
                False,
                {"class": ci, "hole": cls.hole, "reason": "not a partition"},
            )
    if res.classes and all(cls.hole is not None for cls in res.classes):
        assert design.groups is not None
        per_group = [0] * len(design.groups)
        for cls in res.classes:
            per_group[cls.hole] += 1  # type: ignore[index]
        for gi, group in enumerate(design.groups):
            if 2 * per_group[gi] != len(group):
                return Check(
                    "resolution",
                    False,
                    {"group": gi, "classes": per_group[gi], "want": len(group) / 2},
                )
        if 2 * len(res.classes) != v:
            return Check(
                "resolution",
                False,
                {"classes": len(res.classes), "want": v / 2},
            )
    return Check("resolution", True)


def _augmentation_checks(design: Design, nesting: Nesting) -> tuple[list[Check], Design | None]:
    checks: list[Check] = []
    total = len(nesting.assignment) == len(design.blocks)
    checks.append(
        Check(
            "assignment-total",
            total,
            None if total else {"got": len(nesting.assignment), "want": len(design.blocks)},
        )
    )
    consistent = nesting.v == design.v and nesting.w >= design.v
    checks.append(Check("universe-consistent", consistent))
    if not (total and consistent):
        return checks, None
    try:
        augmented = augment(design, nesting)
    except NestingError as err:
        if err.code != "NESTED_POINT_INSIDE_BLOCK":
            raise
        checks.append(Check("nested-point-outside-block", False, {"blocks": err.payload}))
        return checks, None
    checks.append(Check("nested-point-outside-block", True))
    return checks, augmented


def verify_weak_nesting(design: Design, nesting: Nesting) -> Certificate:
    """Check that the nesting is weak: the underlying design is a BIBD
    and the augmented blocks form a partial (w, k+1, lambda+1) design."""
    underlying = verify_bibd(design)
    checks = [Check("underlying-bibd", underlying.ok, _carry_witness(underlying))]
    aug_checks, augmented = _augmentation_checks(design, nesting)
    checks.extend(aug_checks)
    if augmented is not None:
        cap = verify_partial(augmented.blocks_array(), nesting.w, design.lam + 1)
        checks.append(
            Check("augmented-pair-cap", cap.ok, cap.witness)
        )
    ok = all(c.ok for c in checks)
    p = design.params
    return Certificate(
        "weak-nesting", ok, tuple(checks), w=nesting.w, params=(p.v, p.k, p.lam)
    )


def _carry_witness(cert: Certificate) -> object:
    failure = cert.first_failure()
    if failure is None:
        return None
    return {"check": failure.name, "witness": failure.witness}


def _nested_pair_repeat(
    design: Design, nesting: Nesting
) -> tuple[int, int] | None:
    """First repeated nested pair {x, phi(A)}, scanning blocks in order."""
    seen: set[tuple[int, int]] = set()
    for block, p in zip(design.blocks, nesting.assignment):
        for x in block:
            pair = (x, p) if x < p else (p, x)
            if pair in seen:
                return pair
            seen.add(pair)
    return None


def verify_strong_nesting(design: Design, nesting: Nesting) -> Certificate:
    """Check the strong property: weak, nested point disjoint from its
    block, and all nested-point pairs {x, phi(A)} globally distinct."""
    weak = verify_weak_nesting(design, nesting)
    checks = list(weak.checks)

    repeat = _nested_pair_repeat(design, nesting)
    witness = None
    if repeat is not None:
        x, y = repeat
        witness = _pair_witness(nesting.universe.all_labels(), x, y)
    checks.append(Check("nested-pairs-distinct", repeat is None, witness))

    # redundant consequence: a new point with all pairs distinct nests
    # pairwise-disjoint blocks, so at most floor(v/k) of them
    degree_bad = None
    if repeat is None:
        nest_count: dict[int, int] = {}
        for p in nesting.assignment:
            if p >= design.v:
                nest_count[p] = nest_count.get(p, 0) + 1
        cap = design.v // design.k
        for p, n in sorted(nest_count.items()):
            if n > cap:
                degree_bad = {"point": p, "blocks": n, "cap": cap}
                break
    checks.append(Check("new-point-degree-cap", degree_bad is None, degree_bad))

    ok = all(c.ok for c in checks)
    p = design.params
    return Certificate(
        "strong-nesting", ok, tuple(checks), w=nesting.w, params=(p.v, p.k, p.lam)
    )


def verify_nested_gdd(design: Design, nesting: Nesting, strong: bool = False) -> Certificate:
    """Check a nesting of a group divisible design.

    The augmented blocks must form a partial (k+1)-GDD with cross index
    lambda+1 and nothing inside a group, so a nest may never land in the
    group of one of its block's points.  New points sit outside every
    group and are always cross.  With strong=True the nested pairs must
    additionally be globally distinct, as for strong nestings of BIBDs.
    """
    underlying = verify_gdd(design)
    checks = [Check("underlying-gdd", underlying.ok, _carry_witness(underlying))]
    aug_checks, augmented = _augmentation_checks(design, nesting)
    checks.extend(aug_checks)

    if augmented is not None:
        group_of = design.group_of()
        counts = pair_counts(augmented.blocks, nesting.w)
        cross_bad = None
        within_bad = None
        for x, y, n in counts.items():
            within = (
                x < design.v
                and y < design.v
                and group_of[x] == group_of[y]
            )
            if within and within_bad is None:
                within_bad = _pair_witness(nesting.universe.all_labels(), x, y)
                within_bad["count"] = n
            if not within and n > design.lam + 1 and cross_bad is None:
                cross_bad = _pair_witness(nesting.universe.all_labels(), x, y)
                cross_bad["count"] = n
        checks.append(Check("augmented-cross-pair-cap", cross_bad is None, cross_bad))
        checks.append(
            Check("no-augmented-within-group-pairs", within_bad is None, within_bad)
        )

    if strong:
        repeat = _nested_pair_repeat(design, nesting)
        witness = None
        if repeat is not None:
            witness = _pair_witness(nesting.universe.all_labels(), *repeat)
        checks.append(Check("nested-pairs-distinct", repeat is None, witness))

    ok = all(c.ok for c in checks)
    p = design.params
    return Certificate(
        "nested-gdd", ok, tuple(checks), w=nesting.w, params=(p.v, p.k, p.lam)
    )


def classify(design: Design, nesting: Nesting) -> Certificate:
    """Report which of WEAK / STRONG / MINIMAL / PERFECT the nesting is.

    For minimal nestings the parameter equivalences (perfect iff
    k = 2*lam+1 iff v = 2r+1) are cross-checked; a disagreement fails
    the `equivalences-consistent` check, which should be impossible on
    a correct implementation.
    """
    weak = verify_weak_nesting(design, nesting)
    strong = verify_strong_nesting(design, nesting)
    flags: list[str] = []
    checks: list[Check] = [Check("weak", weak.ok, _carry_witness(weak))]
    if weak.ok:
        flags.append("WEAK")
    if strong.ok:
        flags.append("STRONG")

    minimal = weak.ok and nesting.w == design.v
    if minimal:
        flags.append("MINIMAL")
        # Table-1 chain: a minimal nesting is necessarily strong
        checks.append(Check("minimal-implies-strong", strong.ok, _carry_witness(strong)))

    perfect = False
    if minimal:
        augmented = augment(design, nesting)
        perfect = verify_bibd(augmented).ok
        if perfect:
            flags.append("PERFECT")
        k_form = design.k == 2 * design.lam + 1
        v_form = design.params.admissible() and design.v == 2 * design.params.r + 1
        consistent = perfect == k_form == v_form
        checks.append(
            Check(
                "equivalences-consistent",
                consistent,
                None
                if consistent
                else {"perfect": perfect, "k=2lam+1": k_form, "v=2r+1": v_form},
            )
        )

    ok = weak.ok and all(c.ok for c in checks)
    p = design.params
    return Certificate(
        "classification",
        ok,
        tuple(checks),
        w=nesting.w,
        params=(p.v, p.k, p.lam),
        classification=tuple(flags),
    )

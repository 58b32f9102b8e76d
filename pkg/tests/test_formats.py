import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ag23, design_432, e4_strong_nesting, sts7, sts7_perfect_nesting
from nestkit.core import Design, DesignParams, Nesting, NestingError, PointUniverse
from nestkit.formats import (
    canonicalize,
    certificate_from_dict,
    certificate_to_dict,
    design_from_dict,
    design_hash,
    design_to_dict,
    dumps_bytes,
    is_canonical,
    load_design,
    load_nesting,
    nesting_from_dict,
    nesting_hash,
    nesting_to_dict,
    save_design,
    save_nesting,
    subject_hashes,
)
from nestkit.verify import classify, verify_bibd


def test_design_round_trip_plain():
    d = sts7()
    assert design_from_dict(design_to_dict(d)) == d


def test_design_round_trip_with_resolution_and_labels():
    d = ag23()
    assert design_from_dict(design_to_dict(d)) == d
    labelled = design_432()
    assert design_from_dict(design_to_dict(labelled)) == labelled


def test_nesting_round_trip():
    _, nesting = e4_strong_nesting()
    assert nesting_from_dict(nesting_to_dict(nesting)) == nesting


def test_file_round_trip_and_byte_reproducibility(tmp_path):
    d, nesting = sts7_perfect_nesting()
    p1 = save_design(d, tmp_path / "a.json")
    p2 = save_design(d, tmp_path / "b.json")
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_bytes().endswith(b"\n")
    assert b"\r" not in p1.read_bytes()
    assert load_design(p1) == d
    np = save_nesting(nesting, tmp_path / "n.json")
    assert load_nesting(np) == nesting


def test_malformed_files_raise_with_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(NestingError) as exc:
        load_design(bad)
    assert exc.value.code == "MALFORMED_FILE"
    for broken in [
        {},
        {"v": 7, "k": 3, "lambda": 1, "w": 7},
        {"v": 7, "k": 3, "lambda": 1, "w": 7, "blocks": [[0, 1]]},
        {"v": "7", "k": 3, "lambda": 1, "w": 7, "blocks": []},
    ]:
        with pytest.raises(NestingError) as exc:
            design_from_dict(broken)
        assert exc.value.code == "MALFORMED_FILE"
    with pytest.raises(NestingError):
        nesting_from_dict({"v": 4, "w": 5})


def test_canonicalize_sorts_blocks_and_remaps_classes():
    d = ag23()
    # reverse the block order and rebuild classes against it
    n = len(d.blocks)
    rev = Design(
        params=d.params,
        universe=d.universe,
        blocks=tuple(reversed(d.blocks)),
        resolution=None,
    )
    assert not is_canonical(rev)
    canon, _ = canonicalize(rev)
    assert is_canonical(canon)
    assert sorted(canon.blocks) == list(canon.blocks)
    assert sorted(rev.blocks) == list(canon.blocks)
    # with resolution: indices must follow the permutation
    canon_full, _ = canonicalize(d)
    assert is_canonical(canon_full)
    assert verify_bibd(canon_full).ok
    for cls in canon_full.resolution.classes:
        covered = sorted(x for i in cls.blocks for x in canon_full.blocks[i])
        assert covered == list(range(9))


def test_canonicalize_carries_nesting_and_breaks_duplicate_ties():
    u = PointUniverse(3, 5)
    d = Design(
        params=DesignParams(3, 2, 2),
        universe=u,
        blocks=((0, 2), (0, 1), (0, 1), (1, 2)),
    )
    nesting = Nesting(universe=u, assignment=(1, 4, 3, 0))
    canon, cn = canonicalize(d, nesting)
    assert canon.blocks == ((0, 1), (0, 1), (0, 2), (1, 2))
    # the two (0,1) copies sort by their nested point: 3 before 4
    assert cn.assignment == (3, 4, 1, 0)


def test_hashes_invariant_under_reordering():
    d = sts7()
    rev = Design(
        params=d.params, universe=d.universe, blocks=tuple(reversed(d.blocks))
    )
    assert design_hash(d) == design_hash(rev)
    assert design_hash(d) != design_hash(ag23())
    d2, nesting = sts7_perfect_nesting()
    rev_nesting = Nesting(
        universe=nesting.universe, assignment=tuple(reversed(nesting.assignment))
    )
    assert nesting_hash(d2, nesting) == nesting_hash(rev, rev_nesting)
    hashes = subject_hashes(d2, nesting)
    assert set(hashes) == {"design", "nesting"}


def test_certificate_round_trip():
    d, nesting = sts7_perfect_nesting()
    cert = classify(d, nesting)
    assert cert.ok
    back = certificate_from_dict(json.loads(dumps_bytes(certificate_to_dict(cert))))
    assert back.kind == cert.kind
    assert back.ok == cert.ok
    assert back.w == cert.w
    assert back.params == cert.params
    assert back.classification == cert.classification
    assert [c.name for c in back.checks] == [c.name for c in cert.checks]


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_random_design_round_trips(data):
    v = data.draw(st.integers(min_value=2, max_value=8))
    k = data.draw(st.integers(min_value=2, max_value=min(4, v)))
    nblocks = data.draw(st.integers(min_value=0, max_value=6))
    blocks = tuple(
        tuple(
            sorted(
                data.draw(
                    st.lists(
                        st.integers(min_value=0, max_value=v - 1),
                        min_size=k,
                        max_size=k,
                        unique=True,
                    )
                )
            )
        )
        for _ in range(nblocks)
    )
    d = Design(
        params=DesignParams(v, k, 1),
        universe=PointUniverse(v, v),
        blocks=blocks,
    )
    assert design_from_dict(json.loads(dumps_bytes(design_to_dict(d)))) == d
    canon, _ = canonicalize(d)
    assert is_canonical(canon)
    assert design_hash(canon) == design_hash(d)

"""File formats: designs, nestings, and certificates as JSON.

Every artifact the command line reads or writes goes through here.
The encoding is deterministic byte for byte: UTF-8, LF line endings,
sorted object keys, no insignificant whitespace, one trailing newline.
Saving preserves the caller's block order so load(save(x)) == x holds
exactly; reordering into canonical form is a separate, explicit step.

Design file schema:

  {"v": int, "k": int, "lambda": int, "w": int,
   "labels": [str, ...] | null,          # length w when present
   "groups": [[int, ...], ...] | null,
   "blocks": [[int, ...], ...],          # each block strictly increasing
   "classes": [{"hole": null | int, "blocks": [int, ...]}, ...] | null}

Nesting file schema (assignment is parallel to the design's blocks):

  {"v": int, "w": int, "labels": [...] | null, "assignment": [int, ...]}

Certificate files mirror the Certificate dataclass field for field.

A design is canonical when its block list is lexicographically sorted.
canonicalize() reorders blocks into that form and remaps resolution
class indices and any accompanying nesting assignment to match; when
repeated blocks carry different nested points the assignment value
breaks the tie, keeping the output unique.  Content hashes are sha256
over the canonical bytes, so reorderings of the same design agree.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from nestkit.core import (
    Design,
    DesignParams,
    Nesting,
    NestingError,
    PointUniverse,
    Resolution,
    ResolutionClass,
)
from nestkit.verify import Certificate, Check

__all__ = [
    "dumps_bytes",
    "sha256_hex",
    "design_to_dict",
    "design_from_dict",
    "nesting_to_dict",
    "nesting_from_dict",
    "certificate_to_dict",
    "certificate_from_dict",
    "save_design",
    "load_design",
    "save_nesting",
    "load_nesting",
    "save_certificate",
    "load_json",
    "save_json",
    "is_canonical",
    "canonicalize",
    "design_hash",
    "nesting_hash",
    "subject_hashes",
]


def dumps_bytes(obj: Any) -> bytes:
    text = json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return (text + "\n").encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _malformed(msg: str, **payload: Any) -> NestingError:
    return NestingError("MALFORMED_FILE", msg, payload=payload or None)


def save_json(obj: Any, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(dumps_bytes(obj))
    return path


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise _malformed(f"cannot read JSON from {path}: {exc}") from exc


# ---------------------------------------------------------------- designs


def design_to_dict(design: Design) -> dict:
    u = design.universe
    classes = None
    if design.resolution is not None:
        classes = [
            {"hole": cls.hole, "blocks": list(cls.blocks)}
            for cls in design.resolution.classes
        ]
    return {
        "v": design.v,
        "k": design.k,
        "lambda": design.lam,
        "w": u.size,
        "labels": list(u.labels) if u.labels is not None else None,
        "groups": [list(g) for g in design.groups] if design.groups is not None else None,
        "blocks": [list(b) for b in design.blocks],
        "classes": classes,
    }


def _require(d: dict, key: str) -> Any:
    if key not in d:
        raise _malformed(f"missing field {key!r}")
    return d[key]


def design_from_dict(d: dict) -> Design:
    if not isinstance(d, dict):
        raise _malformed("design file is not a JSON object")
    v = _require(d, "v")
    k = _require(d, "k")
    lam = _require(d, "lambda")
    w = _require(d, "w")
    blocks = _require(d, "blocks")
    if not all(isinstance(x, int) for x in (v, k, lam, w)):
        raise _malformed("v, k, lambda, w must be integers")
    labels = d.get("labels")
    groups = d.get("groups")
    classes = d.get("classes")
    try:
        universe = PointUniverse(
            old_count=v,
            size=w,
            labels=tuple(str(x) for x in labels) if labels is not None else None,
        )
        resolution = None
        if classes is not None:
            resolution = Resolution(
                tuple(
                    ResolutionClass(
                        blocks=tuple(int(i) for i in _require(cls, "blocks")),
                        hole=cls.get("hole"),
                    )
                    for cls in classes
                )
            )
        return Design(
            params=DesignParams(v, k, lam),
            universe=universe,
            blocks=tuple(tuple(int(x) for x in b) for b in blocks),
            groups=tuple(tuple(int(x) for x in g) for g in groups)
            if groups is not None
            else None,
            resolution=resolution,
        )
    except NestingError:
        raise
    except (TypeError, ValueError) as exc:
        raise _malformed(f"design file fails structural validation: {exc}") from exc


def save_design(design: Design, path: str | Path) -> Path:
    return save_json(design_to_dict(design), path)


def load_design(path: str | Path) -> Design:
    return design_from_dict(load_json(path))


# ---------------------------------------------------------------- nestings


def nesting_to_dict(nesting: Nesting) -> dict:
    u = nesting.universe
    return {
        "v": u.old_count,
        "w": u.size,
        "labels": list(u.labels) if u.labels is not None else None,
        "assignment": list(nesting.assignment),
    }


def nesting_from_dict(d: dict) -> Nesting:
    if not isinstance(d, dict):
        raise _malformed("nesting file is not a JSON object")
    v = _require(d, "v")
    w = _require(d, "w")
    assignment = _require(d, "assignment")
    labels = d.get("labels")
    try:
        universe = PointUniverse(
            old_count=v,
            size=w,
            labels=tuple(str(x) for x in labels) if labels is not None else None,
        )
        return Nesting(universe=universe, assignment=tuple(int(x) for x in assignment))
    except NestingError:
        raise
    except (TypeError, ValueError) as exc:
        raise _malformed(f"nesting file fails structural validation: {exc}") from exc


def save_nesting(nesting: Nesting, path: str | Path) -> Path:
    return save_json(nesting_to_dict(nesting), path)


def load_nesting(path: str | Path) -> Nesting:
    return nesting_from_dict(load_json(path))


# ------------------------------------------------------------ certificates


def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "kind": cert.kind,
        "ok": cert.ok,
        "w": cert.w,
        "params": list(cert.params) if cert.params is not None else None,
        "classification": list(cert.classification),
        "bound": cert.bound,
        "subject": cert.subject,
        "notes": list(cert.notes),
        "checks": [c.as_dict() for c in cert.checks],
    }


def certificate_from_dict(d: dict) -> Certificate:
    if not isinstance(d, dict):
        raise _malformed("certificate file is not a JSON object")
    try:
        checks = tuple(
            Check(name=c["name"], ok=c["ok"], witness=c.get("witness"))
            for c in _require(d, "checks")
        )
        params = d.get("params")
        return Certificate(
            kind=_require(d, "kind"),
            ok=_require(d, "ok"),
            checks=checks,
            w=d.get("w"),
            params=tuple(params) if params is not None else None,
            classification=tuple(d.get("classification") or ()),
            bound=d.get("bound"),
            subject=d.get("subject"),
            notes=tuple(d.get("notes") or ()),
        )
    except (TypeError, KeyError) as exc:
        raise _malformed(f"certificate file fails validation: {exc}") from exc


def save_certificate(cert: Certificate, path: str | Path) -> Path:
    return save_json(certificate_to_dict(cert), path)


# ---------------------------------------------------------- canonical form


def is_canonical(design: Design) -> bool:
    return list(design.blocks) == sorted(design.blocks)


def canonicalize(
    design: Design, nesting: Nesting | None = None
) -> tuple[Design, Nesting | None]:
    """Sort blocks lexicographically, remapping classes and the nesting.

    Repeated blocks are ordered by their nested point when a nesting is
    supplied, which pins a unique output for multisets whose copies are
    nested differently.
    """
    n = len(design.blocks)
    if nesting is not None and len(nesting.assignment) != n:
        raise ValueError("nesting does not match design block count")

    def key(i: int):
        tie = nesting.assignment[i] if nesting is not None else -1
        return (design.blocks[i], tie, i)

    order = sorted(range(n), key=key)
    inverse = {old: new for new, old in enumerate(order)}
    blocks = tuple(design.blocks[i] for i in order)
    resolution = None
    if design.resolution is not None:
        classes = []
        for cls in design.resolution.classes:
            classes.append(
                ResolutionClass(
                    blocks=tuple(sorted(inverse[i] for i in cls.blocks)), hole=cls.hole
                )
            )
        classes.sort(key=lambda c: (-1 if c.hole is None else c.hole, c.blocks))
        resolution = Resolution(tuple(classes))
    canon = Design(
        params=design.params,
        universe=design.universe,
        blocks=blocks,
        groups=design.groups,
        resolution=resolution,
    )
    remapped = None
    if nesting is not None:
        remapped = Nesting(
            universe=nesting.universe,
            assignment=tuple(nesting.assignment[i] for i in order),
        )
    return canon, remapped


def design_hash(design: Design) -> str:
    canon, _ = canonicalize(design)
    return sha256_hex(dumps_bytes(design_to_dict(canon)))


def nesting_hash(design: Design, nesting: Nesting) -> str:
    _, canon_nesting = canonicalize(design, nesting)
    assert canon_nesting is not None
    return sha256_hex(dumps_bytes(nesting_to_dict(canon_nesting)))


def subject_hashes(design: Design, nesting: Nesting | None = None) -> dict:
    out = {"design": design_hash(design)}
    if nesting is not None:
        out["nesting"] = nesting_hash(design, nesting)
    return out

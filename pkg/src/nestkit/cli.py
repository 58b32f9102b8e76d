"""Command line driver: construct, verify, bound, search, convert, catalog.

Exit codes are part of the contract: 0 for a passing run, 1 for a
verification failure, 2 when the requested case is unsupported or an
ingredient is missing, 3 for malformed input (including bad usage, so
scripted callers can tell a typo from a genuine gap).  Reports go to
stdout as text or JSON; artifact files are canonical JSON so repeated
runs diff clean.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from nestkit.bounds import check_optimal, strong_lower_bound, weak_lower_bound
from nestkit.core import Design, Nesting, NestingError
from nestkit.direct import (
    FIXTURE_NAMES,
    fixture,
    strong_nest_pairs_1mod4,
    weak_nest_pairs,
)
from nestkit.formats import (
    load_design,
    load_json,
    load_nesting,
    save_certificate,
    save_design,
    save_json,
    save_nesting,
    subject_hashes,
)
from nestkit.levi import (
    colouring_from_dict,
    colouring_to_dict,
    colouring_to_nesting,
    is_exact_colouring,
    levi_graph,
    nesting_to_colouring,
    verify_harmonious,
)
from nestkit.recursive import construct_nested, packaged_ingredients
from nestkit.search import Exhausted, find_min_nesting
from nestkit.verify import (
    Certificate,
    classify,
    verify_strong_nesting,
    verify_weak_nesting,
)

# NestingError codes that are not verification failures get their own exits.
_EXIT_BY_CODE = {
    "UNSUPPORTED_CASE": 2,
    "MISSING_INGREDIENT": 2,
    "INFEASIBLE_PARAMS": 2,
    "MALFORMED_FILE": 3,
    "UNKNOWN_FIXTURE": 3,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
        return
    for line in _text_lines(report):
        print(line)


def _text_lines(report: dict, indent: str = "") -> list[str]:
    lines: list[str] = []
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text_lines(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.extend(_text_lines(item, indent + "  "))
                lines.append(f"{indent}  -")
            lines.pop()
        else:
            lines.append(f"{indent}{key}: {value}")
    return lines


def _certificate_report(cert: Certificate) -> dict:
    out: dict = {"ok": cert.ok, "kind": cert.kind}
    if cert.w is not None:
        out["w"] = cert.w
    if cert.params is not None:
        out["params"] = list(cert.params)
    if cert.classification:
        out["classification"] = list(cert.classification)
    if cert.bound is not None:
        out["bound"] = cert.bound
    failure = cert.first_failure()
    if failure is not None:
        out["failed_check"] = failure.name
        if failure.witness is not None:
            out["witness"] = failure.witness
    if cert.notes:
        out["notes"] = list(cert.notes)
    return out


def _write_artifacts(prefix: str, design: Design, nesting: Nesting,
                     cert: Certificate) -> list[str]:
    cert = replace(cert, subject=subject_hashes(design, nesting))
    paths = [
        str(save_design(design, f"{prefix}.design.json")),
        str(save_nesting(nesting, f"{prefix}.nesting.json")),
        str(save_certificate(cert, f"{prefix}.certificate.json")),
    ]
    return paths


# ------------------------------------------------------------------ verbs


def cmd_construct(args) -> tuple[int, dict]:
    if args.target == "pairs-weak":
        design, nesting = weak_nest_pairs(args.v)
        cert = check_optimal(verify_weak_nesting(design, nesting), "WEAK")
        mode = "WEAK"
        ingredients: list[str] = []
    elif args.target == "pairs-strong":
        design, nesting = strong_nest_pairs_1mod4(args.v)
        cert = check_optimal(verify_strong_nesting(design, nesting), "STRONG")
        mode = "STRONG"
        ingredients = []
    elif args.target == "k3l2":
        result = construct_nested(args.v, args.mode, search_seconds=args.search_seconds)
        design, nesting, cert = result.design, result.nesting, result.certificate
        mode = args.mode.upper()
        ingredients = [f"{ing.kind} {ing.name} [{ing.source}]" for ing in result.ingredients]
    else:  # fixture
        rec = fixture(args.name)
        design, nesting = rec.design, rec.nesting
        mode = rec.mode
        verifier = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
        cert = check_optimal(verifier(design, nesting), mode)
        ingredients = []

    prefix = args.out
    if prefix is None:
        tag = args.name if args.target == "fixture" else f"v{design.v}"
        prefix = f"{args.target}-{tag}-{mode.lower()}"
    files = _write_artifacts(prefix, design, nesting, cert)

    ok = cert.ok
    if args.require_optimal and not (cert.bound and cert.bound.get("met")):
        ok = False
    report = {
        "command": "construct",
        "target": args.target,
        "v": design.v,
        "mode": mode,
        "w": nesting.w,
        "certificate": _certificate_report(cert),
        "files": files,
        "seed": args.seed,
    }
    if ingredients:
        report["ingredients"] = ingredients
    return (0 if ok else 1), report


def _load_subject(args) -> tuple[Design, Nesting]:
    if args.fixture is not None:
        rec = fixture(args.fixture)
        return rec.design, rec.nesting
    if not args.files or len(args.files) != 2:
        raise NestingError(
            "MALFORMED_FILE", "expected DESIGN and NESTING files (or --fixture NAME)"
        )
    return load_design(args.files[0]), load_nesting(args.files[1])


def cmd_verify(args) -> tuple[int, dict]:
    design, nesting = _load_subject(args)
    mode = args.mode.upper()
    if mode == "CLASSIFY":
        cert = classify(design, nesting)
    elif mode == "STRONG":
        cert = verify_strong_nesting(design, nesting)
    else:
        cert = verify_weak_nesting(design, nesting)
    report = {
        "command": "verify",
        "mode": mode,
        "certificate": _certificate_report(cert),
        "checks": [c.as_dict() for c in cert.checks],
    }
    return (0 if cert.ok else 1), report


def cmd_bound(args) -> tuple[int, dict]:
    fn = strong_lower_bound if args.mode == "strong" else weak_lower_bound
    value = fn(args.v, args.k, args.lam)
    report = {
        "command": "bound",
        "mode": args.mode.upper(),
        "params": [args.v, args.k, args.lam],
        "bound": value,
    }
    if args.format == "text":
        print(value)
        return 0, {}
    return 0, report


def cmd_search(args) -> tuple[int, dict]:
    if args.fixture is not None:
        design = fixture(args.fixture).design
    elif args.files:
        design = load_design(args.files[0])
    else:
        raise NestingError("MALFORMED_FILE", "expected a DESIGN file (or --fixture NAME)")
    cap = args.w_cap if args.w_cap is not None else design.v + design.v // design.k
    result = find_min_nesting(design, args.mode.upper(), w_cap=cap, threads=args.threads)
    report: dict = {
        "command": "search",
        "mode": args.mode.upper(),
        "v": design.v,
        "w_cap": cap,
        "seed": args.seed,
        "threads": args.threads,
    }
    if isinstance(result, Exhausted):
        report["exhausted"] = True
        report["w"] = None
        return 0, report
    report["exhausted"] = False
    report["w"] = result.w
    if args.out is not None:
        cert = classify(design, result)
        report["files"] = _write_artifacts(args.out, design, result, cert)
    return 0, report


def cmd_convert(args) -> tuple[int, dict]:
    if args.to == "colouring":
        design, nesting = _load_subject(args)
        colouring = nesting_to_colouring(design, nesting)
        cert = verify_harmonious(levi_graph(design), colouring)
        out = args.out or "out.colouring.json"
        save_json(colouring_to_dict(colouring), out)
        report = {
            "command": "convert",
            "to": "colouring",
            "colours": colouring.w,
            "exact": is_exact_colouring(design, colouring),
            "certificate": _certificate_report(cert),
            "files": [out],
        }
        return (0 if cert.ok else 1), report

    # colouring -> nesting
    if args.fixture is not None or not args.files or len(args.files) != 2:
        raise NestingError(
            "MALFORMED_FILE", "expected DESIGN and COLOURING files for --to nesting"
        )
    design = load_design(args.files[0])
    colouring = colouring_from_dict(load_json(args.files[1]))
    nesting = colouring_to_nesting(design, colouring)
    cert = verify_strong_nesting(design, nesting)
    out = args.out or "out.nesting.json"
    save_nesting(nesting, out)
    report = {
        "command": "convert",
        "to": "nesting",
        "w": nesting.w,
        "certificate": _certificate_report(cert),
        "files": [out],
    }
    return (0 if cert.ok else 1), report


def cmd_catalog(args) -> tuple[int, dict]:
    fixtures = []
    for name in FIXTURE_NAMES:
        rec = fixture(name)
        verifier = verify_strong_nesting if rec.mode == "STRONG" else verify_weak_nesting
        cert = verifier(rec.design, rec.nesting)
        fixtures.append(
            {
                "name": name,
                "v": rec.design.v,
                "w": rec.w,
                "mode": rec.mode,
                "verified": cert.ok and cert.w == rec.w,
            }
        )
    ingredients = []
    for ing in packaged_ingredients():
        ingredients.append(
            {
                "name": ing.name,
                "kind": ing.kind,
                "signature": dict(sorted(ing.signature.items())),
                "verified": True,  # loading re-runs the kind's verifier
            }
        )
    report = {
        "command": "catalog",
        "fixtures": fixtures,
        "ingredients": ingredients,
    }
    return 0, report


# ------------------------------------------------------------------ wiring


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized tie-breaks (recorded in reports)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for search")
    parser.add_argument("--format", choices=("json", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nestkit", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("construct", help="build a nested design and write artifacts")
    p.add_argument("target", choices=("pairs-weak", "pairs-strong", "k3l2", "fixture"))
    p.add_argument("--v", type=int, help="number of old points")
    p.add_argument("--mode", choices=("weak", "strong"), default="weak")
    p.add_argument("--name", help="fixture name (target=fixture)")
    p.add_argument("--out", help="artifact path prefix")
    p.add_argument("--require-optimal", action="store_true",
                   help="exit 1 unless the lower bound is met")
    p.add_argument("--search-seconds", type=float, default=60.0,
                   help="budget for ingredient searches")
    _add_common(p)
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("verify", help="verify a nesting against a design")
    p.add_argument("files", nargs="*", help="DESIGN and NESTING files")
    p.add_argument("--fixture", help="verify a packaged fixture instead of files")
    p.add_argument("--mode", choices=("weak", "strong", "classify"), default="classify")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bound", help="print a lower bound on w")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--mode", choices=("weak", "strong"), required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("search", help="exhaustive minimum-w search")
    p.add_argument("files", nargs="*", help="DESIGN file")
    p.add_argument("--fixture", help="search a packaged fixture's design")
    p.add_argument("--mode", choices=("weak", "strong", "minimal"), required=True)
    p.add_argument("--w-cap", type=int, help="largest w to try (default v + floor(v/k))")
    p.add_argument("--out", help="write the found nesting under this prefix")
    _add_common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("convert", help="move between nestings and colourings")
    p.add_argument("files", nargs="*",
                   help="DESIGN+NESTING (to colouring) or DESIGN+COLOURING (to nesting)")
    p.add_argument("--to", choices=("colouring", "nesting"), required=True)
    p.add_argument("--fixture", help="convert a packaged fixture instead of files")
    p.add_argument("--out", help="output file")
    _add_common(p)
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("catalog", help="list fixtures and packaged ingredients")
    _add_common(p)
    p.set_defaults(fn=cmd_catalog)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, report = args.fn(args)
    except NestingError as err:
        report = {"error": {"code": err.code, "message": str(err)}}
        if err.payload is not None:
            report["error"]["payload"] = err.payload
        _emit(report, args.format)
        return _EXIT_BY_CODE.get(err.code, 1)
    except OSError as err:
        _emit({"error": {"code": "MALFORMED_FILE", "message": str(err)}}, args.format)
        return 3
    if report:
        _emit(report, args.format)
    return status


if __name__ == "__main__":
    raise SystemExit(main())

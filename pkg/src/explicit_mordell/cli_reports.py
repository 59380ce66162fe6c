"""Command-line interface, the built-in curve dataset and report serialisation."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any, Sequence

from flint import arb
from gmpy2 import mpq

from . import __version__
from ._rigor import decimal_down, decimal_up, float_down, float_up, lower, to_arb
from .curve_families import FamilySpec, IntPoly, genus2_to_E
from .ec_arith import ECPoint, EllipticCurveQ, curve_new, torsion_subgroup
from .errors import MordellError, ParseError, StabilityNotReached, ValidationError
from .explicit_constants import table1, theorem_constants
from .heights import GENERATOR_EPS, canonical_height, hw_curve
from .lower_bounds import crossover_n, family_lambda
from .sieve_search import RationalPointsReport, SieveConfig, sieve_a, solve_family
from .upper_bounds import (
    BoundReport,
    bound_Cn,
    bound_Dn,
    bound_E2,
    bound_poly,
    cn_coefficients,
    demjanenko_bounds,
    dn_prime_coefficients,
    genus2_h2_upper,
)

CSV_SCHEMA = "explicit-mordell-csv/1"
EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_UNSTABLE = 0, 1, 2, 3


# ---------------------------------------------------------------- dataset


@dataclass(frozen=True)
class CurveRecord:
    label: str
    A: int
    B: int
    rank: int
    generator: tuple[str, str, str, str] | None
    torsion_order: int
    hhat_lower: str | None = None

    @property
    def curve(self) -> EllipticCurveQ:
        return curve_new(self.A, self.B, label=self.label)

    @property
    def generator_point(self) -> ECPoint | None:
        if self.generator is None:
            return None
        xn, xd, yn, yd = (int(v) for v in self.generator)
        return self.curve.point(mpq(xn, xd), mpq(yn, yd))

    @property
    def hhat_lower_ball(self) -> arb | None:
        return None if self.hhat_lower is None else to_arb(self.hhat_lower)


_REQUIRED = ("label", "A", "B", "rank", "torsion_order")


def _parse_record(obj: dict, where: str) -> CurveRecord:
    missing = [k for k in _REQUIRED if k not in obj]
    if missing:
        raise ParseError(f"{where}: missing fields {missing}")
    try:
        gen = obj.get("generator")
        if gen is not None:
            if len(gen) != 4:
                raise ValueError("generator needs four integers")
            gen = tuple(str(int(v)) for v in gen)
        return CurveRecord(label=str(obj["label"]), A=int(obj["A"]), B=int(obj["B"]), rank=int(obj["rank"]),
                           generator=gen, torsion_order=int(obj["torsion_order"]),
                           hhat_lower=None if obj.get("hhat_lower") is None else str(obj["hhat_lower"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def _validate(rec: CurveRecord) -> None:
    try:
        E = rec.curve
        if rec.generator is not None:
            xn, xd, yn, yd = (int(v) for v in rec.generator)
            if not E.contains(mpq(xn, xd), mpq(yn, yd)):
                raise ValidationError(f"{rec.label}: generator is not on the curve")
    except MordellError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{rec.label}: {exc}") from exc
    if len(torsion_subgroup(E)) != rec.torsion_order:
        raise ValidationError(f"{rec.label}: torsion order {rec.torsion_order} disagrees with "
                              f"computed {len(torsion_subgroup(E))}")


def load_curves(path: str | os.PathLike | None = None) -> list[CurveRecord]:
    """Read and validate a JSON-lines curve file (the built-in dataset by default)."""
    if path is None:
        path = os.environ.get("MORDELL_CURVES")
    if path is None:
        text = resources.files("explicit_mordell").joinpath("data/curves.jsonl").read_text()
        where = "curves.jsonl"
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        where = str(path)
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{where}:{lineno}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"{where}:{lineno}: expected an object")
        rec = _parse_record(obj, f"{where}:{lineno}")
        _validate(rec)
        records.append(rec)
    return records


@lru_cache(maxsize=4)
def _builtin_records() -> tuple[CurveRecord, ...]:
    return tuple(load_curves(None))


def find_curve(label: str) -> CurveRecord:
    for rec in _builtin_records():
        if rec.label == label:
            return rec
    raise ValidationError(f"unknown curve label {label!r}")


def builtin_generator(E: EllipticCurveQ) -> ECPoint | None:
    for rec in _builtin_records():
        if rec.A == E.A and rec.B == E.B and rec.generator is not None:
            g = rec.generator_point
            return E.point(g.x, g.y)
    return None


# ---------------------------------------------------------------- serialisation


def real_up(x: arb) -> dict:
    return {"value": decimal_up(x), "machine": float_up(x).hex()}


def real_down(x: arb) -> dict:
    return {"value": decimal_down(x), "machine": float_down(x).hex()}


def point_json(P: ECPoint) -> Any:
    return "O" if P.is_infinity else [str(P.x), str(P.y)]


def constants_json(E: EllipticCurveQ, rational_points: bool = True) -> dict:
    tab = table1(E, rational_points)
    tc = theorem_constants(E, rational_points)
    out = {name: real_up(v) for name, v in tab.as_dict().items()}
    out.update({"C1": real_up(tc.C1), "C2": real_up(tc.C2), "C3": real_up(tc.C3),
                "variant": "rational" if rational_points else "general"})
    return out


def bound_json(rep: BoundReport) -> dict:
    out = {"formula": rep.formula_id, "hhat_upper": real_up(rep.hhat_upper), "a_box": rep.a_box,
           "b_box": rep.b_box, "hhat_g_lower": real_down(rep.hhat_g_lower)}
    for key, val in rep.details.items():
        if isinstance(val, arb):
            out[key] = real_up(val)
        elif isinstance(val, dict):
            out[key] = {k: real_up(v) for k, v in val.items()}
        else:
            out[key] = val
    return out


def report_json(rep: RationalPointsReport) -> dict:
    lower_info = dict(rep.lower)
    if lower_info.get("lambda") is not None:
        lower_info["lambda"] = real_down(lower_info["lambda"])
    return {
        "version": __version__,
        "family": rep.family_id,
        "curve": rep.curve_label,
        "path": rep.path,
        "bound": bound_json(rep.bound),
        "lower_bound": lower_info,
        "sieve": None if rep.sieve is None else rep.sieve.as_dict(),
        "points": [[point_json(P1), point_json(P2)] for P1, P2 in rep.points],
        "timing_seconds": {k: round(v, 6) for k, v in rep.timing.items()},
        "config": rep.config,
    }


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return rows
    if isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        rows = []
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}[{i}]"))
        return rows
    if isinstance(obj, list):
        return [(prefix, " ".join(str(v) for v in obj))]
    return [(prefix, "" if obj is None else str(obj))]


def render(obj: Any, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    rows = _flatten(obj)
    if fmt == "text":
        return "".join(f"{k}: {v}\n" for k, v in rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["schema", "key", "value"])
        for k, v in rows:
            writer.writerow([CSV_SCHEMA, k, v])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------- commands


def _curve_and_generator(label: str):
    rec = find_curve(label)
    return rec, rec.curve, rec.generator_point


def _generator_lower(rec: CurveRecord, E: EllipticCurveQ, g: ECPoint) -> arb:
    if rec.hhat_lower is not None:
        return rec.hhat_lower_ball
    return to_arb(lower(canonical_height(E, g, GENERATOR_EPS)))


def _parse_poly(text: str) -> IntPoly:
    """Coefficients from the constant term up, comma separated."""
    try:
        return IntPoly(tuple(int(c) for c in text.split(",")))
    except ValueError as exc:
        raise ParseError(f"bad polynomial {text!r}: {exc}") from exc


def _family(args, E: EllipticCurveQ) -> FamilySpec:
    if args.family == "cn":
        return FamilySpec.power(E, args.n)
    if args.family == "dn":
        return FamilySpec.cyclo(E, args.n)
    if args.family == "poly":
        return FamilySpec.poly(E, _parse_poly(args.poly))
    raise ParseError(f"family {args.family!r} is not supported here")


def cmd_constants(args) -> dict:
    rec = find_curve(args.curve)
    E = rec.curve
    return {"curve": rec.label, "A": str(E.A), "B": str(E.B), **constants_json(E, not args.general)}


def cmd_curve_info(args) -> dict:
    rec, E, g = _curve_and_generator(args.curve)
    out = {"curve": rec.label, "A": str(E.A), "B": str(E.B), "discriminant": str(E.discriminant),
           "j_invariant": str(E.j_invariant), "hW": real_up(hw_curve(E)),
           "torsion": [point_json(T) for T in torsion_subgroup(E)], "rank": rec.rank}
    if g is not None:
        h = canonical_height(E, g, args.eps)
        out["generator"] = point_json(g)
        out["generator_height"] = {"lower": real_down(h), "upper": real_up(h), "eps": args.eps}
    return out


def cmd_bound(args) -> dict:
    if args.family == "genus2":
        model = genus2_to_E(args.a, args.b)
        h2 = genus2_h2_upper(args.a, args.b)
        return {"family": f"genus2[a={args.a},b={args.b}]", "short_model": [str(model.short.A), str(model.short.B)],
                "degree": 12, "h2_upper": real_up(h2), "hhat_upper": real_up(bound_E2(model.short, h2, 12))}
    rec, E, g = _curve_and_generator(args.curve)
    hg = _generator_lower(rec, E, g)
    if args.family == "cn":
        rep = bound_Cn(E, args.n, hg)
    elif args.family == "dn":
        rep = bound_Dn(E, args.n, hg)
    else:
        rep = bound_poly(E, _parse_poly(args.poly), hg)
    return {"curve": rec.label, **bound_json(rep)}


def cmd_lower_bound(args) -> dict:
    rec, E, g = _curve_and_generator(args.curve)
    hg = _generator_lower(rec, E, g)
    res = crossover_n(E, args.family, g, hg, mode=args.mode, exponent=args.exponent)
    out = {"curve": rec.label, "family": args.family, "mode": res.mode, "ell": res.ell, "factor": res.factor,
           "crossover_n": res.n, "exponent": args.exponent}
    if res.phi_threshold is not None:
        out["phi_threshold"] = res.phi_threshold
    if args.n is not None:
        fam = _family(args, E)
        lam = family_lambda(E, g, fam.defining_polynomial(), hg)
        out["n"] = args.n
        out["lambda"] = None if lam is None else {"mode": lam[0], "value": real_down(lam[1])}
    return out


def _config(args) -> SieveConfig:
    return SieveConfig(ntest=args.ntest, parallel_width=args.width, kernel=args.kernel)


def cmd_sieve(args) -> dict:
    rec, E, g = _curve_and_generator(args.curve)
    fam = _family(args, E)
    hg = _generator_lower(rec, E, g)
    rep = {"cn": bound_Cn, "dn": bound_Dn}.get(fam.kind)
    bound = rep(E, fam.n, hg) if rep else bound_poly(E, fam.polynomial, hg)
    a_box = args.a_box if args.a_box is not None else bound.a_box
    outcome = sieve_a(E, g, fam.defining_polynomial(), a_box, _config(args), translates=torsion_subgroup(E))
    return {"curve": rec.label, "family": fam.family_id, "a_box": a_box, **outcome.as_dict()}


def _parse_range(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_solve(args) -> dict:
    rec, E, g = _curve_and_generator(args.curve)
    hg = _generator_lower(rec, E, g)
    torsion = torsion_subgroup(E)
    if args.batch:
        reports = []
        for n in _parse_range(args.batch):
            args.n = n
            reports.append(report_json(solve_family(E, g, torsion, _family(args, E), _config(args), hg)))
        return {"curve": rec.label, "reports": reports}
    return report_json(solve_family(E, g, torsion, _family(args, E), _config(args), hg))


def cmd_demjanenko(args) -> dict:
    model = genus2_to_E(args.a, args.b)
    if args.hhat is not None:
        hP0 = to_arb(args.hhat)
    else:
        rec = next((r for r in _builtin_records() if (r.A, r.B) == (model.short.A, model.short.B)), None)
        if rec is None or rec.hhat_lower is None:
            raise ParseError("no stored generator height for this curve; pass --hhat")
        hP0 = rec.hhat_lower_ball
    rep = demjanenko_bounds(args.a, args.b, hP0)
    return {"a": args.a, "b": args.b, "hhat_P0_lower": real_down(hP0), "general": rep.general,
            "kulesz": rep.kulesz, "simple": rep.simple, "general_real": real_up(rep.general_real),
            "kulesz_real": real_up(rep.kulesz_real), "simple_real": real_up(rep.simple_real),
            "hhat_upper": real_up(rep.hhat_upper)}


def cmd_table(args) -> dict:
    labels = [args.curve] if args.curve else ["E1", "E2", "E3", "E4", "E5"]
    rows = []
    for label in labels:
        rec, E, g = _curve_and_generator(label)
        hg = _generator_lower(rec, E, g)
        coeffs = cn_coefficients(E, hg) if args.theorem == "cn" else dn_prime_coefficients(E, hg)
        rows.append({"curve": label, "hhat_g_lower": rec.hhat_lower or str(lower(hg)), **coeffs})
    return {"theorem": args.theorem, "coefficient_order": "highest degree first", "rows": rows}


# ---------------------------------------------------------------- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_family(p, families=("cn", "dn", "poly")):
    p.add_argument("--curve", required=True)
    p.add_argument("--family", choices=families, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--poly", help="integer coefficients from the constant term up, comma separated")


def _add_sieve_opts(p):
    p.add_argument("--ntest", type=int, default=25)
    p.add_argument("--width", type=int, default=1, help="primes processed in parallel")
    p.add_argument("--kernel", choices=("compiled", "python"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="explicit-mordell", description=__doc__)
    parser.add_argument("--format", choices=("json", "csv", "text"), default="json")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="table of height constants")
    p.add_argument("curve")
    p.add_argument("--general", action="store_true", help="use the general-field column")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("curve-info", help="discriminant, j, torsion and generator height")
    p.add_argument("curve")
    p.add_argument("--eps", type=float, default=1e-3)
    p.set_defaults(func=cmd_curve_info)

    p = sub.add_parser("bound", help="upper bound and search box for a family")
    p.add_argument("--curve")
    p.add_argument("--family", choices=("cn", "dn", "poly", "genus2"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--poly")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("lower-bound", help="lower bound for non-integral points and crossover index")
    _add_family(p, ("cn", "dn"))
    p.add_argument("--mode", choices=("auto", "general", "trivial"), default="auto")
    p.add_argument("--exponent", choices=("smooth", "ceil"), default="smooth")
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("sieve", help="run the prime sieve only")
    _add_family(p)
    _add_sieve_opts(p)
    p.add_argument("--a-box", type=int, dest="a_box")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("solve", help="all rational points of a family member")
    _add_family(p)
    _add_sieve_opts(p)
    p.add_argument("--batch", help="range of n such as 1-30 or 2,3,5")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("demjanenko", help="index bounds for the genus-2 family")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--hhat", help="lower bound for the generator height (decimal)")
    p.set_defaults(func=cmd_demjanenko)

    p = sub.add_parser("table", help="coefficient tables of the family bounds")
    p.add_argument("--theorem", choices=("cn", "dn"), required=True)
    p.add_argument("--curve")
    p.set_defaults(func=cmd_table)
    return parser


def _check_args(args) -> None:
    needs_n = getattr(args, "family", None) in ("cn", "dn") and args.command != "lower-bound"
    if needs_n and args.n is None and not getattr(args, "batch", None):
        raise ParseError("--n is required for this family")
    if getattr(args, "family", None) == "poly" and not args.poly:
        raise ParseError("--poly is required for the poly family")
    if args.command == "bound":
        if args.family == "genus2" and (args.a is None or args.b is None):
            raise ParseError("--a and --b are required for the genus-2 family")
        if args.family != "genus2" and not args.curve:
            raise ParseError("--curve is required")


def cli(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_args(args)
        result = args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StabilityNotReached as exc:
        print(f"stability not reached: {exc}; survivors {list(exc.survivors)}", file=sys.stderr)
        return EXIT_UNSTABLE
    except MordellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    out.write(render(result, args.format))
    return EXIT_OK


def main() -> None:
    sys.exit(cli())

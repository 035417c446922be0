"""Command-line front end.

    bicirc seq --a 2 --b 3 --preset fibonacci --count 8
    bicirc bounds --a 1 --b 1 --w0 0 --w1 1 --n 3 --r 2
    bicirc verify
    bicirc sweep --a 1,2 --n 1:6 --r 0.5,2 --out sweep.csv

Exit codes: 0 all checks pass, 1 usage error, 2 a verification failed,
3 a degenerate closed form fell back to the direct route (checks passed).
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import norms, spectral
from .circulant import build_Wr, densify, matrix_to_json
from .numeric import BicircError, GaussianRational, Tolerances, parse_gaussian
from .sequences import SeqParams, generate
from .verify import VerifyGrid, run_verify

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_DEGENERATE = 0, 1, 2, 3
SWEEP_CAP = 100_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    params: SeqParams
    n: int
    r: GaussianRational
    tolerances: Tolerances
    output_format: str
    seed: int


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _seed(args) -> int:
    env = os.environ.get("BICIRC_SEED")
    raw = env if env is not None else args.seed
    try:
        seed = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"seed: not an integer: {raw!r}")
    if not 0 <= seed < 2 ** 64:
        raise UsageError(f"seed: must be a 64-bit unsigned integer, got {seed}")
    return seed


def _params(args) -> SeqParams:
    w0, w1 = args.w0, args.w1
    if args.preset == "fibonacci":
        w0, w1 = 0, 1
    elif args.preset == "lucas":
        w0, w1 = 2, args.b
    try:
        return SeqParams(args.a, args.b, w0, w1)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def _tolerances(args) -> Tolerances:
    try:
        return Tolerances(rel_tol=args.tol_rel, abs_tol=args.tol_abs)
    except ValueError as exc:
        raise UsageError(f"tolerances: {exc}")


def _ratio(text: str) -> GaussianRational:
    try:
        r = parse_gaussian(text)
    except ValueError as exc:
        raise UsageError(f"r: {exc}")
    if r.is_zero():
        raise UsageError("r: must be nonzero (r in C\\{0}, the r-circulant ratio)")
    return r


def build_config(args) -> RunConfig:
    if args.n < 1:
        raise UsageError(f"n: must be a positive integer, got {args.n}")
    return RunConfig(_params(args), args.n, _ratio(args.r), _tolerances(args), args.format, _seed(args))


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in payload.items():
            w.writerow([k, json.dumps(v)])
        return buf.getvalue()
    labels = list(payload) + ["check " + c["name"] for c in payload.get("checks", [])]
    width = max(len(k) for k in labels)
    lines = []
    for k, v in payload.items():
        if k == "checks":
            for c in v:
                lines.append(f"{'check ' + c['name']:<{width}}  {'PASS' if c['pass'] else 'FAIL'}  slack={c['slack']:.3e}")
        else:
            lines.append(f"{k:<{width}}  {v if isinstance(v, str) else json.dumps(v)}")
    return "\n".join(lines)


def _status(checks: list[dict], degenerate: bool = False) -> int:
    if not all(c["pass"] for c in checks):
        return EXIT_FAILED
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_seq(args) -> int:
    p = _params(args)
    if args.count < 1:
        raise UsageError(f"count: must be a positive integer, got {args.count}")
    values = generate(p, args.count - 1).values
    if args.format == "json":
        _emit(args, json.dumps([str(v) for v in values]))
    else:
        _emit(args, ",".join(str(v) for v in values))
    return EXIT_OK


def cmd_matrix(args) -> int:
    cfg = build_config(args)
    C = build_Wr(cfg.params, cfg.n, complex(cfg.r))
    payload = matrix_to_json(C)
    if cfg.output_format == "json":
        _emit(args, json.dumps(payload))
    else:
        rows = densify(C)
        if cfg.output_format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            for row in rows:
                w.writerow([repr(complex(z)) for z in row])
            _emit(args, buf.getvalue())
        else:
            _emit(args, "\n".join("  ".join(f"{complex(z):.6g}" for z in row) for row in rows))
    return EXIT_OK


def norms_payload(cfg: RunConfig) -> dict:
    rep = norms.analyze_norms(cfg.params, cfg.n, cfg.r, cfg.tolerances, cfg.seed)
    return {
        "frobenius": rep.frobenius_direct,
        "frobenius_closed_sq": _frac(rep.frobenius_closed_sq),
        "spectral": rep.spectral_numeric,
        "lower": rep.lower_bound,
        "upper": rep.upper_bound,
        "regime": rep.regime.value,
        "checks": [c.to_json() for c in rep.checks],
    }


def cmd_norms(args) -> int:
    cfg = build_config(args)
    payload = norms_payload(cfg)
    _emit(args, _render(payload, cfg.output_format))
    return _status(payload["checks"])


def cmd_bounds(args) -> int:
    cfg = build_config(args)
    payload = norms_payload(cfg)
    r = complex(cfg.r)
    hb = norms.hadamard_bound(cfg.params, cfg.n, r, cfg.tolerances, cfg.seed)
    payload["delta"] = _frac(norms.delta(cfg.params, cfg.n))
    payload["hadamard"] = {
        "r1_U": hb.r1_U, "c1_W": hb.c1_W, "product": hb.product,
        "spectral_of_product_matrix": hb.spectral_of_product_matrix,
    }
    special = {}
    p = cfg.params
    applicable = {
        norms.SpecialCase.BI_FIBONACCI: (p.w0, p.w1) == (0, 1),
        norms.SpecialCase.BI_LUCAS: (p.w0, p.w1) == (2, p.b),
        norms.SpecialCase.CLASSICAL_GENERALIZED: p.a == p.b == 1,
    }
    for kind, ok in applicable.items():
        if ok:
            sb = norms.special_case_bounds(kind, p, cfg.n, r)
            special[kind.value] = {"lower": sb.lower, "upper": sb.upper}
            payload["checks"].append({"name": f"special_case_{kind.value}",
                                      "pass": sb.lower == payload["lower"] and sb.upper == payload["upper"],
                                      "slack": 0.0})
    payload["special_cases"] = special
    payload["checks"] = payload.pop("checks")
    _emit(args, _render(payload, cfg.output_format))
    return _status(payload["checks"])


def spectral_payload(cfg: RunConfig, break_sign: bool = False) -> tuple[dict, bool]:
    r = complex(cfg.r)
    eig = spectral.analyze_eigen(cfg.params, cfg.n, r, cfg.tolerances)
    det = spectral.analyze_det(cfg.params, cfg.n, r, cfg.tolerances, break_sign=break_sign)
    checks = [{"name": name, "pass": ok, "slack": slack} for name, ok, slack in eig.checks()]
    checks.append({"name": "det_agreement", "pass": det.passed,
                   "slack": spectral.CROSS_TOL - det.max_pairwise_rel_err})
    payload = {
        "method": eig.method.value,
        "rho": _pair(eig.dft.rho),
        "eigenvalues": [_pair(z) for z in eig.eigenvalues],
        "det_closed": None if det.det_closed is None else _pair(det.det_closed),
        "det_lu": _pair(det.det_lu),
        "det_product": _pair(det.det_product),
        "max_pairwise_rel_err": det.max_pairwise_rel_err,
        "residual": eig.residual,
        "degenerate_js": eig.degenerate_js,
    }
    if eig.skipped or det.skipped:
        payload["skipped"] = eig.skipped or det.skipped
    payload["checks"] = checks
    return payload, bool(eig.degenerate_js) or det.degenerate


def cmd_eig(args) -> int:
    cfg = build_config(args)
    payload, degenerate = spectral_payload(cfg)
    _emit(args, _render(payload, cfg.output_format))
    return _status(payload["checks"], degenerate)


cmd_det = cmd_eig


def _int_list(text: str, field: str) -> list[int]:
    """``"1,2,5"`` or inclusive ranges ``"1:4"`` (mixable: ``"1:3,7"``)."""
    out: list[int] = []
    try:
        for part in filter(None, (s.strip() for s in text.split(","))):
            if ":" in part:
                lo, hi = (int(x) for x in part.split(":"))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"{field}: cannot parse integer list {text!r}")
    if not out:
        raise UsageError(f"{field}: empty range")
    return out


def _ratio_list(text: str) -> list[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("r: empty range")
    for s in items:
        _ratio(s)
    return items


SWEEP_COLUMNS = ["a", "b", "w0", "w1", "n", "r_re", "r_im", "frobenius", "spectral", "lower", "upper",
                 "gap_lower", "gap_upper", "det_re", "det_im", "degenerate", "regime"]


def sweep_row(point: tuple) -> list:
    a, b, w0, w1, n, r_text, tol, seed = point
    p = SeqParams(a, b, w0, w1)
    r = complex(parse_gaussian(r_text))
    A = densify(build_Wr(p, n, r))
    fro = norms.frobenius(A)
    spec = norms.spectral_norm(A, tol, seed)
    bnd = norms.spectral_bounds(p, n, r)
    det = spectral.analyze_det(p, n, r, tol)
    value = det.det_lu if n == 1 else det.value
    return [a, b, w0, w1, n, repr(r.real), repr(r.imag), repr(fro), repr(spec), repr(bnd.lower),
            repr(bnd.upper), repr(spec - bnd.lower), repr(bnd.upper - spec), repr(value.real),
            repr(value.imag), str(det.degenerate).lower(), bnd.regime.value]


def cmd_sweep(args) -> int:
    tol, seed = _tolerances(args), _seed(args)
    axes = [_int_list(args.a, "a"), _int_list(args.b, "b"), _int_list(args.w0, "w0"),
            _int_list(args.w1, "w1"), _int_list(args.n, "n"), _ratio_list(args.r)]
    size = 1
    for ax in axes:
        size *= len(ax)
    if size > args.cap:
        raise UsageError(f"sweep: grid has {size} points, over the cap of {args.cap} (raise --cap)")
    for a, b, w0, w1 in itertools.product(*axes[:4]):
        try:
            SeqParams(a, b, w0, w1)
        except ValueError as exc:
            raise UsageError(str(exc))
    if min(axes[4]) < 1:
        raise UsageError("n: must be positive integers")
    points = [(*pt, tol, seed) for pt in itertools.product(*axes)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_row, points, chunksize=64))
    else:
        rows = [sweep_row(pt) for pt in points]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(rows)
    _emit(args, buf.getvalue())
    return EXIT_DEGENERATE if any(row[15] == "true" for row in rows) else EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args)
    grid = VerifyGrid()
    for name in ("a", "b", "w0", "w1", "n"):
        text = getattr(args, name)
        if text is not None:
            setattr(grid, name, _int_list(text, name))
    if args.r is not None:
        grid.r = _ratio_list(args.r)
        grid.random_phase_moduli = []
    if args.random_pairs is not None:
        grid.random_pairs = args.random_pairs
    try:
        for a, b, w0, w1 in itertools.product(grid.a, grid.b, grid.w0, grid.w1):
            SeqParams(a, b, w0, w1)
    except ValueError as exc:
        raise UsageError(str(exc))
    if min(grid.n) < 1:
        raise UsageError("n: must be positive integers")
    report = run_verify(grid, seed=seed, tol=_tolerances(args), break_sign=args.self_test_break)
    if args.format == "text":
        lines = [f"{'identity':<24}{'checked':>9}{'passed':>9}{'failed':>8}{'skipped':>9}"]
        for name, t in report["identities"].items():
            lines.append(f"{name:<24}{t['checked']:>9}{t['passed']:>9}{t['failed']:>8}{t['skipped']:>9}")
        lines.append(f"status: {report['status']}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps(report, indent=2))
    if report["total_failures"]:
        print(f"verification failed; first failing tuple: {json.dumps(report['first_failure'])}",
              file=sys.stderr)
        return EXIT_FAILED
    return EXIT_DEGENERATE if report["degenerate_fallbacks"] else EXIT_OK


def _common(single: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol-rel", type=float, default=1e-9)
    p.add_argument("--tol-abs", type=float, default=1e-12)
    p.add_argument("--seed", default=str(norms.DEFAULT_SEED),
                   help="power-iteration seed (env BICIRC_SEED overrides)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", metavar="PATH")
    if single:
        p.add_argument("--a", type=int, default=1)
        p.add_argument("--b", type=int, default=1)
        p.add_argument("--w0", type=int, default=0)
        p.add_argument("--w1", type=int, default=1)
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--r", default="1", help='complex literal: "2", "0.5+0.25i", "-3", "i"')
        p.add_argument("--preset", choices=("fibonacci", "lucas"))
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bicirc", description="r-circulant matrices with generalized bi-periodic Fibonacci entries")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    single = _common(True)
    seq = sub.add_parser("seq", parents=[single], help="list w_0 .. w_{count-1}")
    seq.add_argument("--count", type=int, default=10)
    seq.set_defaults(func=cmd_seq)
    for name, func, help_ in (
        ("matrix", cmd_matrix, "dump W_r"),
        ("norms", cmd_norms, "Frobenius and spectral norms with checks"),
        ("bounds", cmd_bounds, "spectral norm bounds incl. special cases"),
        ("eig", cmd_eig, "eigenvalues (closed form vs direct sum)"),
        ("det", cmd_det, "determinant (closed form vs product vs LU)"),
    ):
        sub.add_parser(name, parents=[single], help=help_).set_defaults(func=func)

    grid = _common(False)
    sw = sub.add_parser("sweep", parents=[grid], help="CSV over a parameter grid")
    sw.add_argument("--a", default="1:3")
    sw.add_argument("--b", default="1:3")
    sw.add_argument("--w0", default="0")
    sw.add_argument("--w1", default="1")
    sw.add_argument("--n", default="1:8")
    sw.add_argument("--r", default="0.5,2")
    sw.add_argument("--cap", type=int, default=SWEEP_CAP)
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=cmd_sweep, format="csv")

    ver = sub.add_parser("verify", parents=[grid], help="check every identity over a grid")
    for name in ("a", "b", "w0", "w1", "n", "r"):
        ver.add_argument(f"--{name}", default=None, help="comma list / inclusive range lo:hi")
    ver.add_argument("--random-pairs", type=int, default=None)
    ver.add_argument("--self-test-break", action="store_true",
                     help="flip one sign in the closed-form determinant; the run must then fail")
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bicirc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BicircError as exc:
        print(f"bicirc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())

"""Command line surface.

Subcommands: build-space, norm, rearrange, avg, verify, witness, probe,
approx.  Structured output is JSON (CSV for probe tables, SVG for plots)
and is deterministic: no timestamps inside artifacts, wall time on
stderr only, seeds mandatory for anything randomized.

Exit codes: 0 all contracts pass, 1 a contract failed (report still
emitted), 2 usage or input error.
"""

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import averaging, compactness, norms, rearrange, space as space_mod, svgplot
from .errors import DomainError, MetricViolationError, NotInSpaceError

_PASS_SLACK = 1e-9


class CLIError(Exception):
    """Usage or input problem; maps to exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise CLIError(f"no such file: {path}")
    except json.JSONDecodeError as err:
        raise CLIError(f"malformed JSON in {path}: line {err.lineno} "
                       f"column {err.colno}: {err.msg}")


def _digest(path: str) -> str:
    with open(path, "rb") as handle:
        return "sha256:" + hashlib.sha256(handle.read()).hexdigest()


def _emit(payload: str, out: str | None) -> None:
    if out:
        svgplot.write_atomic(out, payload)
    else:
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True), out)


def _parse_exponent(raw: str) -> float:
    if raw in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(raw)
    except ValueError:
        raise CLIError(f"not a number: {raw!r}")


def _space_from_args(args) -> space_mod.MetricMeasureSpace:
    return space_mod.build_space(_load_json(args.space))


def _function_from_args(args, sp) -> rearrange.FunctionOnSpace:
    payload = _load_json(args.fn)
    if not isinstance(payload, dict) or "values" not in payload:
        raise CLIError("function JSON must be an object with a 'values' field")
    return rearrange.FunctionOnSpace(sp, np.asarray(payload["values"], dtype=float))


def _norm_spec(args) -> norms.NormSpec:
    return norms.NormSpec(_parse_exponent(args.p), _parse_exponent(args.q),
                          args.variant)


def _input_digests(args) -> dict:
    out = {}
    for name in ("space", "fn"):
        path = getattr(args, name, None)
        if path:
            out[name] = _digest(path)
    return out


def _check(name: str, lhs: float, rhs: float, constants: dict) -> dict:
    lhs, rhs = float(lhs), float(rhs)
    return {
        "name": name,
        "constants": {k: float(v) for k, v in constants.items()},
        "lhs": lhs,
        "rhs": rhs,
        "margin": rhs - lhs,
        "pass": bool(lhs <= rhs * (1.0 + _PASS_SLACK) + 1e-15),
    }


# -- subcommand handlers ------------------------------------------------------

def _cmd_build_space(args) -> int:
    sp = _space_from_args(args)
    _emit_json(sp.to_json(), args.out)
    return 0


def _cmd_norm(args) -> int:
    sp = _space_from_args(args)
    f = _function_from_args(args, sp)
    spec = _norm_spec(args)
    value = norms.lorentz_norm(f, spec)
    _emit_json({"value": value, "normable": spec.normable}, args.out)
    return 0


def _cmd_rearrange(args) -> int:
    sp = _space_from_args(args)
    f = _function_from_args(args, sp)
    if args.distribution:
        sf, title = rearrange.distribution_function(f), "distribution function"
    else:
        sf, title = rearrange.rearrangement(f), "decreasing rearrangement"
    _emit_json(sf.to_json(), args.out)
    if args.plot:
        svgplot.emit_step_svg(sf, args.plot, title=title)
    return 0


def _cmd_avg(args) -> int:
    sp = _space_from_args(args)
    f = _function_from_args(args, sp)
    if args.r <= 0:
        raise CLIError("--r must be positive")
    _emit_json(averaging.average(sp, f, args.r).to_json(), args.out)
    return 0


def _trial_functions(args, sp, spec) -> list[rearrange.FunctionOnSpace]:
    if args.fn:
        return [_function_from_args(args, sp)]
    if args.seed is None:
        raise CLIError("randomized run: --seed is mandatory when --fn is omitted")
    if args.lemma == "equicontinuity":
        return compactness.sample_unit_sphere(sp, spec, args.trials, args.seed)
    rng = np.random.default_rng(args.seed)
    return [rearrange.FunctionOnSpace(sp, rng.standard_normal(sp.natoms))
            for _ in range(args.trials)]


def _verify_distribution(sp, fs, r, spec) -> tuple[list[dict], float, float]:
    c, _ = averaging.distribution_constant(sp, r)
    checks, worst = [], 0.0
    for i, f in enumerate(fs):
        for t in averaging.threshold_sweep(f):
            rep = averaging.verify_distribution_inequality(sp, f, r, float(t))
            ratio = rep.lhs / rep.rhs if rep.rhs > 0 else (0.0 if rep.lhs == 0 else math.inf)
            if ratio >= worst:
                worst = ratio
                worst_check = _check(f"trial-{i}-t-{t:g}", rep.lhs, rep.rhs, {"c": c})
        checks.append(worst_check)
    return checks, worst, c


def _verify_rearrange(sp, fs, r, spec) -> tuple[list[dict], float, float]:
    c, _ = averaging.distribution_constant(sp, r)
    checks, worst = [], 0.0
    for i, f in enumerate(fs):
        rep = averaging.verify_rearrangement_bound(sp, f, r)
        checks.append(_check(f"trial-{i}", rep.max_ratio, rep.constant_c,
                             {"c": c, "worst_t": rep.worst_t}))
        worst = max(worst, rep.max_ratio / c)
    return checks, worst, c


def _verify_operator_bound(sp, fs, r, spec) -> tuple[list[dict], float, float]:
    checks, worst, c = [], 0.0, None
    for i, f in enumerate(fs):
        rep = averaging.verify_operator_bound(sp, f, r, spec)
        c = rep.constant_c
        checks.append(_check(f"trial-{i}", rep.lhs, rep.rhs,
                             {"c": c, "factor": rep.factor}))
        if rep.rhs > 0:
            worst = max(worst, rep.lhs / rep.rhs)
    return checks, worst, c


def _verify_equicontinuity(sp, fs, r, spec) -> tuple[list[dict], float, float | None]:
    bound = averaging.equicontinuity_bound_matrix(sp, r, spec)
    np.fill_diagonal(bound, math.inf)
    kernel = averaging.AveragingKernel.build(sp, r)
    worst, checks = 0.0, []
    for i, f in enumerate(fs):
        avg = kernel.apply(f).values
        ratio = np.abs(avg[:, None] - avg[None, :]) / bound
        j = int(np.argmax(ratio))
        x, y = divmod(j, sp.natoms)
        worst = max(worst, float(ratio[x, y]))
        checks.append(_check(f"trial-{i}-pair-{x}-{y}",
                             float(abs(avg[x] - avg[y])), float(bound[x, y]), {}))
    if spec.variant == norms.PLAIN and spec.p == spec.q:
        for x in range(sp.natoms - 1):
            b, exact = averaging.equicontinuity_modulus(sp, x, x + 1, r, spec)
            checks.append(_check(f"dual-norm-pair-{x}-{x + 1}", exact, b, {}))
            if b > 0:
                worst = max(worst, exact / b)
    return checks, worst, None


def _cmd_verify(args) -> int:
    sp = _space_from_args(args)
    spec = _norm_spec(args)
    if args.r <= 0:
        raise CLIError("--r must be positive")
    fs = _trial_functions(args, sp, spec)
    handler = {
        "distribution": _verify_distribution,
        "rearrange": _verify_rearrange,
        "operator-bound": _verify_operator_bound,
        "equicontinuity": _verify_equicontinuity,
    }[args.lemma]
    checks, worst_ratio, c = handler(sp, fs, args.r, spec)
    passed = all(ch["pass"] for ch in checks)
    report = {
        "command": ["verify", "--lemma", args.lemma],
        "inputs": _input_digests(args),
        "lemma": args.lemma,
        "constant_c": c,
        "worst_ratio": worst_ratio,
        "checks": checks,
        "pass": passed,
    }
    _emit_json(report, args.out)
    return 0 if passed else 1


def _cmd_witness(args) -> int:
    sp = _space_from_args(args)
    spec = _norm_spec(args)
    rep = compactness.witness_sequence(sp, args.r, args.k, spec)
    if rep.bounded_regime:
        _emit_json({
            "command": ["witness"],
            "inputs": _input_digests(args),
            "bounded_regime": True,
            "centers": rep.centers,
            "c_lower": rep.c_lower,
            "pass": True,
        }, args.out)
        return 0
    passed = rep.min_pairwise >= rep.c_lower * (1.0 - _PASS_SLACK)
    _emit_json({
        "command": ["witness"],
        "inputs": _input_digests(args),
        "bounded_regime": False,
        "centers": rep.centers,
        "c_lower": rep.c_lower,
        "min_pairwise": rep.min_pairwise,
        "distances": [[float(d) for d in row] for row in rep.distances],
        "witness_norms": rep.witness_norms,
        "pass": bool(passed),
    }, args.out)
    return 0 if passed else 1


def _parse_family(raw: str) -> tuple[list[space_mod.MetricMeasureSpace], list[str]]:
    parts = raw.split(":")
    if parts[0] != "lattice" or len(parts) not in (2, 4):
        raise CLIError("family must be lattice:L or lattice:START:STOP:STEP")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise CLIError(f"bad family bounds in {raw!r}")
    sizes = nums if len(nums) == 1 else list(range(nums[0], nums[1] + 1, nums[2]))
    if not sizes:
        raise CLIError("family is empty")
    return [space_mod.MetricMeasureSpace.lattice(L) for L in sizes], [str(L) for L in sizes]


def _cmd_probe(args) -> int:
    if args.seed is None:
        raise CLIError("randomized run: --seed is mandatory")
    spaces, labels = _parse_family(args.family)
    spec = _norm_spec(args)
    rows = compactness.compactness_probe(spaces, args.r, spec, args.epsilon,
                                         args.n, args.seed, labels=labels)
    lines = ["L,k,witness_count,witness_min,c_lower"]
    for row in rows:
        wmin = "" if row.witness_min is None else repr(row.witness_min)
        lines.append(f"{row.label},{row.k},{row.witness_count},{wmin},{row.c_lower!r}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        xs = [float(r.label) for r in rows]
        chart = svgplot.line_chart_svg(
            [("net size k", xs, [float(r.k) for r in rows]),
             ("separated witnesses", xs, [float(r.witness_count) for r in rows])],
            xlabel="L", ylabel="count", title="compactness probe")
        svgplot.write_atomic(args.svg, chart)
    return 0


def _cmd_approx(args) -> int:
    sp = _space_from_args(args)
    f = _function_from_args(args, sp)
    spec = _norm_spec(args)
    rep = compactness.simple_approximation(sp, f, args.r, args.epsilon, spec)
    _emit_json({
        "command": ["approx"],
        "inputs": _input_digests(args),
        "centers": rep.centers,
        "radii": rep.radii,
        "coefficients": rep.coefficients,
        "values": rep.function.values.tolist(),
        "error": rep.error,
        "remainder_norm": rep.remainder_norm,
    }, args.out)
    return 0


# -- parser -------------------------------------------------------------------

def _add_norm_flags(p) -> None:
    p.add_argument("--p", required=True, help="first Lorentz exponent (number or inf)")
    p.add_argument("--q", required=True, help="second Lorentz exponent (number or inf)")
    p.add_argument("--variant", default=norms.PLAIN,
                   choices=[norms.PLAIN, norms.DOUBLE_STAR])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loravg")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-space", help="validate a space and emit canonical JSON")
    p.add_argument("--space", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_build_space)

    p = sub.add_parser("norm", help="Lorentz norm of a function")
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True)
    _add_norm_flags(p)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_norm)

    p = sub.add_parser("rearrange", help="decreasing rearrangement step function")
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--distribution", action="store_true",
                   help="emit the distribution function instead")
    p.add_argument("--plot", help="also write a step plot SVG here")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_rearrange)

    p = sub.add_parser("avg", help="apply the averaging operator")
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_avg)

    p = sub.add_parser("verify", help="check one of the operator inequalities")
    p.add_argument("--lemma", required=True,
                   choices=["distribution", "rearrange", "operator-bound",
                            "equicontinuity"])
    p.add_argument("--space", required=True)
    p.add_argument("--r", type=float, required=True)
    _add_norm_flags(p)
    p.add_argument("--fn", help="explicit function (otherwise random, needs --seed)")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("witness", help="non-compactness witness separation")
    p.add_argument("--space", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_norm_flags(p)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("probe", help="covering/witness trends over a space family")
    p.add_argument("--family", required=True, help="lattice:START:STOP:STEP")
    p.add_argument("--r", type=float, required=True)
    _add_norm_flags(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(handler=_cmd_probe)

    p = sub.add_parser("approx", help="simple-function approximation by disjoint balls")
    p.add_argument("--space", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    _add_norm_flags(p)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_approx)

    return parser


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    start = time.perf_counter()
    try:
        code = args.handler(args)
    except (CLIError, DomainError, MetricViolationError, NotInSpaceError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    finally:
        print(f"wall_time_s={time.perf_counter() - start:.3f}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

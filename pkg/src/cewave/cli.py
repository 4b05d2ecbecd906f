"""Command-line front end.

Every analysis writes a flat file (JSON or CSV) whose bytes depend only
on the arguments and the seed, plus a one-line summary on stdout.  Exit
codes: 0 success, 2 bad input (parse, domain, usage), 3 numerical
precondition failure, 4 internal consistency violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .ce import GridSpec, REPORT_SCHEMA, classify
from .charsys import (
    FieldBackground,
    fresnel_roots,
    fresnel_scan_rows,
    write_scan_csv,
)
from .errors import (
    BadParams,
    BadUsage,
    DegeneracyError,
    InputError,
    InternalCheckError,
    NumericalError,
    ParseError,
)
from .gravity import kernel_survey
from .lagrangians import Kind, LagrangianModel, builtin, builtin_names, from_expression
from .rays import (
    ConeHamiltonian,
    QuarticHamiltonian,
    crossing_time,
    trace,
    write_ray_csv,
)
from .shock1d import (
    Profile1D,
    exceptional_flux_demo,
    moc_solve,
    shock_time,
    write_characteristics_csv,
)

DEFAULT_SEED = 42


# --- shared argument plumbing ---------------------------------------------------------


def _parse_floats(text: str, n: int | None = None) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise BadParams(f"could not parse '{text}' as comma-separated "
                        "floats") from exc
    if n is not None and len(values) != n:
        raise BadParams(f"expected {n} comma-separated values, got "
                        f"{len(values)} in '{text}'")
    return values


def parse_grid(text: str) -> GridSpec:
    """Parse 'a:lo:hi:n,b:lo:hi:n' into grid axes."""
    axes: dict[str, tuple[float, float, int]] = {}
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 4:
            raise BadParams(f"grid axis '{chunk}' is not name:lo:hi:n")
        name = parts[0].strip()
        if not name:
            raise BadParams(f"grid axis '{chunk}' has an empty name")
        try:
            lo, hi = float(parts[1]), float(parts[2])
            n = int(parts[3])
        except ValueError as exc:
            raise BadParams(f"grid axis '{chunk}' has non-numeric "
                            "bounds") from exc
        if n < 1:
            raise BadParams(f"grid axis '{name}' needs n >= 1")
        axes[name] = (lo, hi, n)
    if not axes:
        raise BadParams("empty grid argument")
    return GridSpec(axes)


def _add_model_flags(p: argparse.ArgumentParser, prefix: str = "") -> None:
    dash = f"--{prefix}" if prefix else "--"
    p.add_argument(f"{dash}builtin", default=None, metavar="NAME",
                   help="builtin model name (see `--list-builtins`)")
    p.add_argument(f"{dash}params", default=None, metavar="P1,P2",
                   help="comma-separated parameters for the builtin")
    p.add_argument(f"{dash}expr", default=None, metavar="TEXT",
                   help="model expression text")
    p.add_argument(f"{dash}kind", default=None,
                   choices=[k.value for k in Kind],
                   help="invariant signature of --expr")


def _resolve_model(builtin_name, params, expr, kind) -> LagrangianModel:
    if builtin_name is not None and expr is not None:
        raise BadUsage("give either --builtin or --expr, not both")
    if builtin_name is not None:
        values = _parse_floats(params) if params else None
        return builtin(builtin_name, values)
    if expr is not None:
        if kind is None:
            raise BadUsage("--expr needs --kind")
        return from_expression(expr, kind)
    raise BadUsage("no model given; use --builtin NAME or --expr TEXT "
                   "--kind KIND")


def _check_tol(tol: float) -> float:
    if not tol > 0.0:
        raise BadParams(f"tolerance must be positive, got {tol:g}")
    return tol


def _check_format(fmt: str, expected: str, command: str) -> None:
    if fmt != expected:
        raise BadUsage(f"{command} writes {expected} output; "
                       f"--format {fmt} is not available")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2))
        fh.write("\n")


# --- ce check ---------------------------------------------------------------------------


def cmd_ce_check(args) -> int:
    _check_format(args.format, "json", "ce check")
    model = _resolve_model(args.builtin, args.params, args.expr, args.kind)
    grid = parse_grid(args.grid) if args.grid else None
    report = classify(model, grid=grid, tol=_check_tol(args.tol))
    _write_json(args.out, report.to_json())
    print(f"{model.name}: {report.label} "
          f"(max residual {report.max_residual:.3e}) -> {args.out}")
    return 0


# --- fresnel scan ------------------------------------------------------------------------


def _random_background_pairs(model: LagrangianModel, trials: int,
                             rng: np.random.Generator):
    pairs = []
    attempts = 0
    while len(pairs) < trials:
        attempts += 1
        if attempts > 200 * max(trials, 1):
            raise DegeneracyError(
                "could not draw enough usable backgrounds for the "
                "dispersion scan")
        E = rng.uniform(-1.0, 1.0, size=3)
        B = rng.uniform(-1.0, 1.0, size=3)
        nhat = rng.uniform(-1.0, 1.0, size=3)
        if np.linalg.norm(nhat) < 1e-3:
            continue
        bg = FieldBackground.vector(E, B)
        try:
            fresnel_roots(model, bg, nhat)
        except (InputError, NumericalError):
            continue
        pairs.append((bg, nhat / np.linalg.norm(nhat)))
    return pairs


def cmd_fresnel(args) -> int:
    _check_format(args.format, "csv", "fresnel")
    model = _resolve_model(args.builtin, args.params, args.expr, args.kind)
    if args.trials < 1:
        raise BadParams("--trials must be at least 1")
    rng = np.random.default_rng(args.seed)
    pairs = [(FieldBackground.vector([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
              np.array([1.0, 0.0, 0.0]))]
    pairs += _random_background_pairs(model, args.trials, rng)
    header, rows = fresnel_scan_rows(model, pairs)
    write_scan_csv(args.out, header, rows)
    flagged = sum(1 for r in rows if r[header.index("birefringent_flag")]
                  == "true")
    print(f"{model.name}: {len(rows)} roots over {len(pairs)} backgrounds, "
          f"{flagged} birefringent rows -> {args.out}")
    return 0


# --- shock laboratory ----------------------------------------------------------------------


_PROFILES = {
    "sin": lambda: Profile1D.from_callable(np.sin, 0.0, 2.0 * np.pi,
                                           n=401, periodic=True),
    "linear": lambda: Profile1D.from_callable(lambda x: x, -2.0, 2.0,
                                              n=201),
    "step": lambda: Profile1D.from_callable(lambda x: -np.tanh(x),
                                            -5.0, 5.0, n=401),
}


def _stem(path: str) -> str:
    return path[:-5] if path.endswith(".json") else path


def cmd_shock(args) -> int:
    _check_format(args.format, "json", "shock")
    if args.profile not in _PROFILES:
        raise BadParams(f"unknown profile '{args.profile}'; expected one "
                        f"of {sorted(_PROFILES)}")
    profile = _PROFILES[args.profile]()
    t_list = _parse_floats(args.t_list)
    if any(t < 0 for t in t_list):
        raise BadParams("t values must be nonnegative")

    t_star = shock_time(lambda u: u, profile)
    t_cross = crossing_time(profile.u, profile.x, t_max=args.horizon)
    payload = {
        "schema": REPORT_SCHEMA,
        "report": "shock-summary",
        "profile": args.profile,
        "t_list": t_list,
        "horizon": args.horizon,
        "burgers": {"shock_time": t_star, "crossing_time": t_cross},
        "model": None,
    }

    stem = _stem(args.out)
    sols = [moc_solve(lambda u: u, profile, t) for t in t_list]
    write_characteristics_csv(f"{stem}_burgers.csv", profile.x, profile.u,
                              [s.x for s in sols], t_list)
    outputs = [args.out, f"{stem}_burgers.csv"]

    if args.model_builtin or args.model_expr:
        model = _resolve_model(args.model_builtin, args.model_params,
                               args.model_expr, args.model_kind)
        demo = exceptional_flux_demo(model, profile, t_list,
                                     horizon=args.horizon)
        payload["model"] = demo.to_dict()
        write_characteristics_csv(f"{stem}_model.csv", demo.model_phis,
                                  demo.model_lams, demo.model_x, t_list)
        outputs.append(f"{stem}_model.csv")

    _write_json(args.out, payload)
    crossing = payload["model"]["model_crossing"] if payload["model"] else None
    print(f"profile={args.profile} shock_time={t_star} "
          f"model_crossing={crossing} -> {', '.join(outputs)}")
    return 0


# --- gravity kernel survey -------------------------------------------------------------------


def cmd_gravity(args) -> int:
    _check_format(args.format, "json", "gravity")
    rng = np.random.default_rng(args.seed)
    survey = kernel_survey(args.theory, args.D, args.trials, rng,
                           p=args.p, q=args.q, f2=args.fpp)
    payload = {"schema": REPORT_SCHEMA, "report": "gravity-kernel-survey"}
    payload.update(survey)
    _write_json(args.out, payload)
    print(f"{args.theory} D={args.D}: null {survey['null_kernel_dims']} "
          f"nonnull {survey['nonnull_kernel_dims']} -> {args.out}")
    return 0


# --- ray tracing ---------------------------------------------------------------------------


def cmd_rays(args) -> int:
    _check_format(args.format, "csv", "rays")
    E = _parse_floats(args.E, 3)
    B = _parse_floats(args.B, 3)
    nhat = np.array(_parse_floats(args.nhat, 3))
    bg = FieldBackground.vector(E, B)

    if args.cone:
        H = ConeHamiltonian.metric()
        if args.p0:
            p0 = np.array(_parse_floats(args.p0, 4))
        else:
            n = nhat / np.linalg.norm(nhat)
            p0 = np.array([-1.0, *n])
        label = "metric-cone"
    else:
        model = _resolve_model(args.builtin, args.params, args.expr,
                               args.kind)
        H = QuarticHamiltonian(model, bg)
        if args.p0:
            p0 = np.array(_parse_floats(args.p0, 4))
        else:
            roots = fresnel_roots(model, bg, nhat).roots
            n = nhat / np.linalg.norm(nhat)
            p0 = np.array([-float(np.max(roots.real)), *n])
        label = model.name

    ray = trace(H, np.zeros(4), p0, s_max=args.s_max, step=args.step,
                tol=_check_tol(args.tol))
    write_ray_csv(args.out, ray)
    print(f"{label}: {len(ray.states)} states, drift {ray.drift:.3e} "
          f"-> {args.out}")
    return 0


# --- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cewave",
        description="Exceptional-wave analyses of nonlinear field models")
    sub = parser.add_subparsers(dest="command", required=True)

    ce = sub.add_parser("ce", help="classification commands")
    ce_sub = ce.add_subparsers(dest="ce_command", required=True)
    check = ce_sub.add_parser("check",
                              help="classify a model over an invariant grid")
    _add_model_flags(check)
    check.add_argument("--grid", default=None,
                       help="axis spec 'a:lo:hi:n,b:lo:hi:n'")
    check.add_argument("--tol", type=float, default=1e-9)
    check.add_argument("--seed", type=int, default=DEFAULT_SEED)
    check.add_argument("--out", default="ce_report.json")
    check.add_argument("--format", default="json", choices=["json", "csv"])
    check.set_defaults(handler=cmd_ce_check)

    fres = sub.add_parser("fresnel",
                          help="scan quartic dispersion roots over "
                               "random backgrounds")
    _add_model_flags(fres)
    fres.add_argument("--trials", type=int, default=50)
    fres.add_argument("--seed", type=int, default=DEFAULT_SEED)
    fres.add_argument("--out", default="fresnel.csv")
    fres.add_argument("--format", default="csv", choices=["json", "csv"])
    fres.set_defaults(handler=cmd_fresnel)

    shock = sub.add_parser("shock",
                           help="characteristic fans and shock times")
    shock.add_argument("--profile", default="sin",
                       help="initial data: sin, linear, or step")
    shock.add_argument("--t-list", default="0.5,1.0,2.0,5.0",
                       help="comma-separated output times")
    shock.add_argument("--horizon", type=float, default=10.0)
    shock.add_argument("--model-builtin", default=None)
    shock.add_argument("--model-params", default=None)
    shock.add_argument("--model-expr", default=None)
    shock.add_argument("--model-kind", default=None,
                       choices=[k.value for k in Kind])
    shock.add_argument("--seed", type=int, default=DEFAULT_SEED)
    shock.add_argument("--out", default="shock_summary.json")
    shock.add_argument("--format", default="json", choices=["json", "csv"])
    shock.set_defaults(handler=cmd_shock)

    grav = sub.add_parser("gravity",
                          help="kernel survey of metric-discontinuity "
                               "operators")
    grav.add_argument("--theory", default="einstein",
                      choices=["einstein", "quadratic", "fr"])
    grav.add_argument("--trials", type=int, default=200)
    grav.add_argument("--D", type=int, default=4)
    grav.add_argument("--p", type=float, default=1.0)
    grav.add_argument("--q", type=float, default=0.0)
    grav.add_argument("--fpp", type=float, default=1.0)
    grav.add_argument("--seed", type=int, default=DEFAULT_SEED)
    grav.add_argument("--out", default="gravity.json")
    grav.add_argument("--format", default="json", choices=["json", "csv"])
    grav.set_defaults(handler=cmd_gravity)

    rays = sub.add_parser("rays", help="trace a dispersion-surface ray")
    _add_model_flags(rays)
    rays.add_argument("--cone", action="store_true",
                      help="use the flat metric cone instead of a model")
    rays.add_argument("--E", default="0.3,0.0,0.0")
    rays.add_argument("--B", default="0.0,0.4,0.0")
    rays.add_argument("--nhat", default="1.0,0.0,0.0")
    rays.add_argument("--p0", default=None,
                      help="explicit start covector 'p0,p1,p2,p3'")
    rays.add_argument("--s-max", type=float, default=10.0)
    rays.add_argument("--step", type=float, default=1e-2)
    rays.add_argument("--tol", type=float, default=1e-9)
    rays.add_argument("--seed", type=int, default=DEFAULT_SEED)
    rays.add_argument("--out", default="ray.csv")
    rays.add_argument("--format", default="csv", choices=["json", "csv"])
    rays.set_defaults(handler=cmd_rays)

    parser.add_argument("--list-builtins", action="store_true",
                        help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if argv and argv[0] == "--list-builtins":
        for name in builtin_names():
            print(name)
        return 0
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code else 0
    try:
        return args.handler(args)
    except ParseError as exc:
        offset = getattr(exc, "offset", None)
        where = f" at offset {offset}" if offset is not None else ""
        print(f"input error{where}: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

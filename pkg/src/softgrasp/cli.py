"""Command-line front end.

Exit codes: 0 success or stable grasp, 1 input/usage error, 2 unstable
grasp (``check``), 3 no feasible grip (``optimize``).

Inputs may be given in SI (default) or, with ``--units mm-bar-deg``, with
lengths in mm, stiffness in N/mm, inertia in kg*mm^2 and angles in degrees.
Outputs are always SI.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from . import dynamics, friction, model, optimize, stability

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSTABLE = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# per-quantity factor from mm-bar-deg input to SI
_MM = {"length": 1e-3, "stiffness": 1e3, "inertia": 1e-6, "angle": math.pi / 180, "pressure": 1e5}


def _si(args, value, kind):
    if value is None or args.units == "si":
        return value
    return value * _MM[kind]


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(args, text, path=None):
    path = path or args.out
    if path and path != "-":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_config(args) -> model.GraspConfig:
    data = json.loads(_read(args.config))
    if args.units != "si" and isinstance(data, dict):
        kinds = {"k_n": "stiffness", "k_t": "stiffness", "delta_n": "length", "r": "length",
                 "inertia": "inertia"}
        data = {k: (_si(args, v, kinds[k]) if k in kinds and isinstance(v, (int, float)) else v)
                for k, v in data.items()}
    return model.GraspConfig.from_dict(data)


def cmd_check(args):
    cfg = _load_config(args)
    report = stability.analyze(cfg, f_p_max=args.fp_max)
    _emit(args, report.to_json() + "\n")
    return EXIT_OK if report.stable else EXIT_UNSTABLE


def cmd_rest_curve(args):
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    cfg = _load_config(args)
    curve = stability.rest_angle_curve(cfg, (args.fp_min, args.fp_max), args.steps)
    _emit(args, curve.to_csv())
    return EXIT_OK


def cmd_slip_angle(args):
    cfg = _load_config(args)
    if cfg.mu <= 0:
        raise UsageError("slip angle needs mu > 0")
    th_f = stability.slip_angle(cfg)
    out = {"slip_angle": th_f, "rest_angle": stability.rest_angle(cfg)}
    if args.fp_max is not None:
        search = stability.find_slip_preload(cfg, args.fp_max)
        out.update(slip_preload=search.f_p, slip_preload_reason=search.reason)
    _emit(args, _json(out))
    return EXIT_OK


def cmd_simulate(args):
    cfg = _load_config(args)
    try:
        params = dynamics.SimParams(dt=args.dt, t_max=args.t_max, damping=args.damping,
                                    theta0=_si(args, args.theta0, "angle"),
                                    theta_dot0=_si(args, args.theta_dot0, "angle"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    traj = dynamics.integrate(cfg, params)
    events = dynamics.detect_events(cfg, traj)
    if args.out:
        _emit(args, traj.to_csv())
    _emit(args, dynamics.events_to_json(events) + "\n", path=args.events_out or "-")
    return EXIT_OK


def cmd_analyze_trace(args):
    trace = friction.load_trace(args.trace)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = friction.fit_friction(trace)
    if not args.quiet:
        for note in fit.warnings:
            print(f"warning: {note}", file=sys.stderr)
    _emit(args, fit.to_json() + "\n", path=args.report_out)
    return EXIT_OK


def cmd_fit_stiffness(args):
    if args.probes:
        probes = friction.load_probes(args.probes)
    else:
        if None in (args.x0, args.x1, args.f0, args.f1):
            raise UsageError("give a probe CSV or all of --x0 --x1 --f0 --f1")
        probes = [friction.StiffnessProbe(args.direction, _si(args, args.x0, "length"),
                                          _si(args, args.x1, "length"), args.f0, args.f1)]
    rows = [{"direction": p.direction, "pressure_Pa": p.pressure, "offset_m": p.offset,
             "k_N_m": friction.estimate_stiffness(p)} for p in probes]
    _emit(args, _json(rows))
    return EXIT_OK


def cmd_build_map(args):
    smap = friction.build_stiffness_map(friction.load_probes(args.probes))
    if smap.flagged and not args.quiet:
        for key in sorted(smap.flagged):
            print(f"warning: averaged repeated probes at pressure={key[0]}, offset={key[1]}",
                  file=sys.stderr)
    _emit(args, smap.to_csv())
    return EXIT_OK


def cmd_optimize(args):
    smap = friction.StiffnessMap.from_csv(args.map)
    result = optimize.max_stable_preload(
        smap, radius=_si(args, args.radius, "length"), mu=args.mu,
        inertia=_si(args, args.inertia, "inertia"), objective=args.objective,
        refine=args.refine, axis=args.axis, finger_count_share=args.share)
    _emit(args, result.to_json() + "\n")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_inertia(args):
    value = model.inertia_of(args.shape, args.mass, _si(args, args.radius, "length"),
                             _si(args, args.height, "length"))
    _emit(args, _json({"shape": args.shape, "inertia": value}))
    return EXIT_OK


def cmd_gen_trace(args):
    trace = friction.synthetic_trace(
        _si(args, args.k_y, "stiffness"), args.mu, args.f_n, noise=args.noise,
        transition=_si(args, args.transition, "length"), seed=args.seed)
    _emit(args, trace.to_csv())
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--units", choices=("si", "mm-bar-deg"), default=argparse.SUPPRESS,
                        help="input units (default si)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized utilities")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress warnings on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="softgrasp", description="Rotational stability and slip analysis "
                     "of compliant two-finger grasps.")
    parser.add_argument("--units", choices=("si", "mm-bar-deg"), default="si",
                        help="input units (default si)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized utilities")
    parser.add_argument("--out", default=None, help="output file (default stdout)")
    parser.add_argument("--quiet", action="store_true", help="suppress warnings on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    common = [_common()]

    p = sub.add_parser("check", parents=common, help="stability report for a grasp config")
    p.add_argument("config", help="GraspConfig JSON file")
    p.add_argument("--fp-max", type=float, default=None, help="slip-preload search limit (N)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("rest-curve", parents=common, help="rest angle over preload as CSV")
    p.add_argument("config")
    p.add_argument("--fp-min", type=float, default=0.0, help="sweep start (N)")
    p.add_argument("--fp-max", type=float, required=True, help="sweep end (N)")
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_rest_curve)

    p = sub.add_parser("slip-angle", parents=common, help="slip angle (and slip preload)")
    p.add_argument("config")
    p.add_argument("--fp-max", type=float, default=None,
                   help="also search the slip preload up to this force (N)")
    p.set_defaults(func=cmd_slip_angle)

    p = sub.add_parser("simulate", parents=common,
                       help="integrate the rotation; trajectory CSV to --out, events JSON to stdout")
    p.add_argument("config")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--damping", type=float, default=0.0, help="viscous damping (N*m*s/rad)")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--theta-dot0", type=float, default=0.0)
    p.add_argument("--events-out", default=None, help="events JSON file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze-trace", parents=common, help="fit mu and k_y to a sliding trace")
    p.add_argument("trace", help="trace CSV")
    p.add_argument("--report-out", default=None, help="report JSON file (default --out/stdout)")
    p.set_defaults(func=cmd_analyze_trace)

    p = sub.add_parser("fit-stiffness", parents=common, help="stiffness from delta-move probes")
    p.add_argument("probes", nargs="?", help="probe CSV")
    p.add_argument("--direction", choices=("x", "y", "z"), default="y")
    p.add_argument("--x0", type=float)
    p.add_argument("--x1", type=float)
    p.add_argument("--f0", type=float)
    p.add_argument("--f1", type=float)
    p.set_defaults(func=cmd_fit_stiffness)

    p = sub.add_parser("build-map", parents=common, help="stiffness map CSV from probe CSV")
    p.add_argument("probes")
    p.set_defaults(func=cmd_build_map)

    p = sub.add_parser("optimize", parents=common, help="search grip parameters over a map")
    p.add_argument("map", help="stiffness map CSV")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.6)
    p.add_argument("--inertia", type=float, required=True)
    p.add_argument("--objective", choices=optimize.OBJECTIVES, default="max-margin")
    p.add_argument("--refine", type=int, default=1, help="grid subdivisions per map cell")
    p.add_argument("--axis", choices=optimize.AXES, default="x-instability")
    p.add_argument("--share", type=float, default=2.0, help="finger count share of the grip bound")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("inertia", parents=common, help="rotational inertia of a simple solid")
    p.add_argument("--shape", choices=model._SHAPES, required=True)
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--height", type=float, default=None)
    p.set_defaults(func=cmd_inertia)

    # test-data generator; kept out of the help listing
    p = sub.add_parser("gen-trace", parents=common)
    p.add_argument("--k-y", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--f-n", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--transition", type=float, default=0.0)
    p.set_defaults(func=cmd_gen_trace)
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "gen-trace"]

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands:

  construct   build an LDPC code and write it in the code file format
  simulate    Monte Carlo sweep for an LDPC code (BEC or fixed-overhead)
  bounds      Singleton / Berlekamp bounds over an epsilon grid
  thresholds  IT threshold, ML-threshold area bound and Shannon limit
              for an unstructured ensemble
  raptor-sim  fixed-overhead sweep for a fixed-rate Raptor code
  mindist     exhaustive minimum distance of a stored code

Options may come from a flat key=value config file (--config); explicit
command-line flags override config entries. Every CSV-producing run echoes
its full resolved configuration and seed as '#' comment lines.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, ldpc, raptor, sim


def _parse_config(path):
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key=value): {line!r}")
            key, val = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _resolve(args, parser):
    """Merge config-file values under explicit flags. Flags win."""
    if getattr(args, "config", None):
        try:
            cfg = _parse_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        actions = {}
        for sub in parser._subparser_actions():
            for action in sub._actions:
                actions.setdefault(action.dest, action)
        for key, val in cfg.items():
            if not hasattr(args, key) or key not in actions:
                parser.error(f"unknown config key {key!r}")
            if key in args._explicit:
                continue
            action = actions[key]
            if action.type is not None:
                val = action.type(val)
            elif isinstance(action.default, bool):
                val = val.lower() in ("1", "true", "yes")
            setattr(args, key, val)
    return args


class _TrackingParser(argparse.ArgumentParser):
    """Remembers which dests were set explicitly on the command line."""

    def parse_args(self, argv=None, namespace=None):
        args = super().parse_args(argv, namespace)
        explicit = set()
        seen = list(argv if argv is not None else sys.argv[1:])
        for action in self._subparser_actions():
            for opt in seen:
                for sub_action in action._actions:
                    if opt.split("=", 1)[0] in sub_action.option_strings:
                        explicit.add(sub_action.dest)
        args._explicit = explicit
        return args

    def _subparser_actions(self):
        out = [self]
        for action in self._actions:
            if isinstance(action, argparse._SubParsersAction):
                out.extend(action.choices.values())
        return out


def _float_range(text):
    """'a:b:step' inclusive grid, or a single value / comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("expected start:stop:step")
        a, b, step = (float(p) for p in parts)
        count = int(round((b - a) / step)) + 1
        return [a + i * step for i in range(count)]
    return [float(p) for p in text.split(",")]


def _int_range(text):
    """'a:b' inclusive, or a comma list."""
    if ":" in text:
        a, b = (int(p) for p in text.split(":"))
        return list(range(a, b + 1))
    return [int(p) for p in text.split(",")]


def _pair(text):
    a, b = text.split(",")
    return int(a), int(b)


def _echo_header(args, keys):
    hdr = {"command": args.command, "seed": getattr(args, "seed", 0)}
    for key in keys:
        val = getattr(args, key)
        if val is None:
            continue
        if isinstance(val, frozenset):
            val = sorted(val)
        if isinstance(val, (list, tuple)):
            val = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in val)
        hdr[key] = val
    return hdr


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_code(args, parser):
    if args.code:
        return ldpc.load_code(args.code)
    if args.regular:
        dv, dc = args.regular
        if not args.n:
            parser.error("--regular needs --n")
        return ldpc.sample_regular(dv, dc, args.n, seed=args.seed)
    if args.geira:
        k, n = args.geira
        taps = frozenset(_int_range(args.taps))
        return ldpc.build_geira(ldpc.GeiraSpec(k=k, n=n, taps=taps,
                                               wc=args.wc, seed=args.seed))
    parser.error("give one of --code, --regular or --geira")


def _cmd_construct(args, parser):
    code = _build_code(args, parser)
    _emit(ldpc.code_to_text(code), args.out)
    return 0


def _cmd_simulate(args, parser):
    code = _build_code(args, parser)
    if args.eps is not None:
        kind, sweep = "bec", args.eps
    elif args.delta is not None:
        kind, sweep = "overhead", args.delta
    else:
        parser.error("give --eps or --delta")
    plan = sim.SimPlan(code=code, decoder=args.decoder, channel_kind=kind,
                       sweep=sweep, target_errors=args.target_errors,
                       max_trials=args.max_trials, seed=args.seed,
                       zero_codeword=not args.random_codeword,
                       workers=args.workers)
    records = sim.run_sweep(plan)
    hdr = _echo_header(args, ["code", "regular", "geira", "taps", "wc", "n",
                              "decoder", "eps", "delta", "target_errors",
                              "max_trials", "workers"])
    _emit(sim.records_to_csv(records, hdr), args.out)
    return 0


def _cmd_bounds(args, parser):
    if args.eps is None:
        parser.error("give --eps")
    hdr = _echo_header(args, ["n", "k", "eps", "dmin", "amin"])
    lines = [f"# {key}={val}" for key, val in hdr.items()]
    has_floor = args.dmin is not None and args.amin is not None
    tail = analysis.WeightSpectrumTail(args.dmin, args.amin) if has_floor else None
    lines.append("epsilon,singleton,berlekamp" + (",floor" if has_floor else ""))
    for eps in args.eps:
        sb = analysis.singleton_bound(args.n, args.k, eps)
        bb = analysis.berlekamp_bound(args.n, args.k, eps)
        row = f"{eps:g},{sb:.8g},{bb:.8g}"
        if has_floor:
            row += f",{analysis.error_floor_estimate(tail, eps):.8g}"
        lines.append(row)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_thresholds(args, parser):
    if not args.regular:
        parser.error("give --regular dv,dc")
    hdr = _echo_header(args, ["regular"])
    lines = [f"# {key}={val}" for key, val in hdr.items()]
    lines.append("ensemble,eps_it,eps_ml_bound,eps_sh")
    dv, dc = args.regular
    rep = analysis.threshold_report(analysis.DegreeDistribution.regular(dv, dc))
    lines.append(f"({dv}:{dc}),{rep.eps_it:.6f},{rep.eps_ml_bound:.6f},{rep.eps_sh:.6f}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_raptor_sim(args, parser):
    if args.delta is None:
        parser.error("give --delta")
    code = raptor.RaptorCode.build(args.k, args.n, seed=args.seed)
    plan = sim.SimPlan(code=code, decoder="ml", channel_kind="overhead",
                       sweep=args.delta, target_errors=args.target_errors,
                       max_trials=args.max_trials, seed=args.seed,
                       workers=args.workers)
    records = sim.run_sweep(plan)
    hdr = _echo_header(args, ["k", "n", "delta", "target_errors",
                              "max_trials", "workers"])
    hdr["lt_seed"] = code.params.lt_seed
    _emit(sim.records_to_csv(records, hdr), args.out)
    return 0


def _cmd_mindist(args, parser):
    if not args.code:
        parser.error("give --code")
    code = ldpc.load_code(args.code)
    tail = analysis.exhaustive_min_distance(code)
    hdr = _echo_header(args, ["code"])
    lines = [f"# {key}={val}" for key, val in hdr.items()]
    lines.append("d_min,a_min")
    lines.append(f"{tail.d_min},{tail.a_min}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _make_parser():
    parser = _TrackingParser(prog="erasurelab",
                             description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (default: stdout)")

    def code_flags(sp):
        sp.add_argument("--code", help="path to a stored code file")
        sp.add_argument("--regular", type=_pair, metavar="DV,DC")
        sp.add_argument("--geira", type=_pair, metavar="K,N")
        sp.add_argument("--taps", default="0,1", help="accumulator taps")
        sp.add_argument("--wc", type=int, default=3, help="GeIRA column weight")
        sp.add_argument("--n", type=int, default=0, help="block length")

    def sweep_flags(sp):
        sp.add_argument("--target-errors", type=int, default=100)
        sp.add_argument("--max-trials", type=int, default=100000)
        sp.add_argument("--workers", type=int, default=1)

    sp = subs.add_parser("construct", help="build a code and emit its file")
    common(sp)
    code_flags(sp)

    sp = subs.add_parser("simulate", help="Monte Carlo sweep for an LDPC code")
    common(sp)
    code_flags(sp)
    sweep_flags(sp)
    sp.add_argument("--decoder", choices=("it", "ml", "hybrid"), default="ml")
    sp.add_argument("--eps", type=_float_range, metavar="A:B:STEP")
    sp.add_argument("--delta", type=_int_range, metavar="A:B")
    sp.add_argument("--random-codeword", action="store_true",
                    help="encode random inputs instead of the all-zero word")

    sp = subs.add_parser("bounds", help="Singleton/Berlekamp bound grid")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eps", type=_float_range, metavar="A:B:STEP")
    sp.add_argument("--dmin", type=int, help="floor estimate: minimum distance")
    sp.add_argument("--amin", type=int, help="floor estimate: multiplicity")

    sp = subs.add_parser("thresholds", help="ensemble threshold report")
    common(sp)
    sp.add_argument("--regular", type=_pair, metavar="DV,DC")

    sp = subs.add_parser("raptor-sim", help="Raptor fixed-overhead sweep")
    common(sp)
    sweep_flags(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--delta", type=_int_range, metavar="A:B")

    sp = subs.add_parser("mindist", help="exhaustive minimum distance")
    common(sp)
    sp.add_argument("--code", help="path to a stored code file")
    return parser


_DISPATCH = {
    "construct": _cmd_construct,
    "simulate": _cmd_simulate,
    "bounds": _cmd_bounds,
    "thresholds": _cmd_thresholds,
    "raptor-sim": _cmd_raptor_sim,
    "mindist": _cmd_mindist,
}


def main(argv=None):
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        args = _resolve(args, parser)
        return _DISPATCH[args.command](args, parser)
    except SystemExit as exc:
        return exc.code or 0


if __name__ == "__main__":
    sys.exit(main())

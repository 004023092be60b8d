"""Command-line driver.

Subcommands: gen, verify, converge, integrate, bound. Data go to ``--out``
(or stdout) as CSV or JSON; progress and wall times go to stderr so data
files are byte-reproducible for a fixed seed and configuration.

Exit codes: 0 success, 2 invalid configuration, 3 cost or search guard,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

from . import experiments as ex
from .nets import format_matrices, generate_points, interlaced_t_bound
from .quality import SearchLimitExceeded, exact_t_value, min_dick_metric
from .shifts import bound_constants, theoretical_bound

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4


class InvariantFailure(RuntimeError):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--b", type=int, default=2, help="prime base")
    p.add_argument("--alpha", type=int, default=2, help="smoothness of the Sobolev space")
    p.add_argument("--beta", type=int, default=4, help="order of the digital net")
    p.add_argument("--s", type=int, default=1, help="dimension")
    p.add_argument("--m-min", type=int, default=4)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--R", type=int, default=16, help="number of random shifts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generator", choices=("faure", "sobol", "file"), default="sobol")
    p.add_argument("--matrix-file", help="generating matrices for --generator file")
    p.add_argument("--interlace", type=int, default=None,
                   help="interlacing factor (default: beta for sweeps, 1 for gen/verify)")
    p.add_argument("--gamma", default=None,
                   help="weights: product:g1,...,gs or explicit:@file.json")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--ctau-literal", action="store_true",
                   help="use sin(tau/b) instead of sin(pi/b) in the bound constants")
    p.add_argument("--fit-from", type=int, default=None,
                   help="smallest m used in rate fits (default m-min + 1)")
    p.add_argument("--dual-budget", type=int, default=None,
                   help="mu_1 budget for dual-net searches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoqmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write generating matrices and optionally points")
    _common(p)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--points", default=None, help="also write decimal points here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="exact t-value and minimum Dick metric")
    _common(p)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", help="RMS worst-case error sweep over m")
    _common(p)
    p.add_argument("--baseline", action="store_true", help="add a plain Monte Carlo column")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("integrate", help="shifted QMC errors for a catalogue integrand")
    _common(p)
    p.add_argument("--integrand", default="expsum", choices=sorted(ex.INTEGRANDS))
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("bound", help="evaluate the RMS error bound over m")
    _common(p)
    p.add_argument("--t", type=int, default=None, help="t-value (default: computed)")
    p.set_defaults(func=cmd_bound)
    return parser


def config_from_args(args, default_interlace: int | None = None) -> ex.ExperimentConfig:
    m_min, m_max = args.m_min, args.m_max
    if getattr(args, "m", None) is not None:
        m_min = m_max = args.m
    interlace = args.interlace if args.interlace is not None else default_interlace
    return ex.ExperimentConfig(
        b=args.b, alpha=args.alpha, beta=args.beta, s=args.s, m_min=m_min, m_max=m_max,
        R=args.R, seed=args.seed, generator=args.generator, interlace=interlace,
        gamma=args.gamma, matrix_file=args.matrix_file, out=args.out, format=args.format,
        ctau_literal=args.ctau_literal, fit_from=args.fit_from, dual_budget=args.dual_budget,
        baseline=getattr(args, "baseline", False))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_rows(cfg: ex.ExperimentConfig, command: str, rows: list[dict],
                extra: dict | None = None) -> None:
    if cfg.format == "csv":
        _emit(ex.to_csv(rows), cfg.out)
    else:
        _emit(ex.to_json(command, cfg, rows, extra), cfg.out)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_gen(args) -> int:
    cfg = config_from_args(args, default_interlace=1)
    cfg.validate()
    _, G = ex.build_net(cfg, cfg.m_min)
    _emit(format_matrices(G), cfg.out)
    if args.points:
        X = generate_points(G).values()
        Path(args.points).write_text(
            "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in X))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = config_from_args(args, default_interlace=1)
    cfg.validate()
    m, order = cfg.m_min, cfg.order
    Q, G = ex.build_net(cfg, m)
    t = exact_t_value(G, order)
    t_src = exact_t_value(Q, 1)
    t_bound = interlaced_t_bound(t_src, order, cfg.s, m)
    delta = min_dick_metric(G, order, cfg.dual_budget)
    t_ok = t <= t_bound
    delta_ok = delta.value > order * m - t
    row = {"b": cfg.b, "s": cfg.s, "m": m, "order": order, "t_source": t_src,
           "t": t, "t_bound": t_bound, "delta": delta.value,
           "delta_truncated": delta.truncated,
           "t_check": "PASS" if t_ok else "FAIL",
           "delta_check": "PASS" if delta_ok else "FAIL"}
    _log(f"order-{order} net b={cfg.b} s={cfg.s} m={m}: exact t = {t} "
         f"(interlacing bound {t_bound}, source t' = {t_src}) {row['t_check']}")
    _log(f"delta_{order} = {delta.value}{' (cap n+1)' if delta.truncated else ''} "
         f"> {order * m - t}: {row['delta_check']}")
    _write_rows(cfg, "verify", [row])
    if not (t_ok and delta_ok):
        raise InvariantFailure("net quality check failed")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = config_from_args(args)
    res = ex.converge(cfg, log=_log)
    rows = [r.payload() for r in res.records]
    fits = {"fit": asdict(res.fit), "fit_log_corrected": asdict(res.fit_corrected),
            "fit_from": cfg.fit_start}
    if res.fit_baseline is not None:
        fits["fit_baseline"] = asdict(res.fit_baseline)
    _log(f"slope {res.fit.slope:.3f}; log-corrected {res.fit_corrected.slope:.3f} "
         f"(m >= {cfg.fit_start})")
    dominated = all(r.bound >= r.rms for r in res.records)
    _log("bound >= rms at every m: " + ("PASS" if dominated else "NO"))
    _write_rows(cfg, "converge", rows, fits)
    return EXIT_OK


def cmd_integrate(args) -> int:
    cfg = config_from_args(args)
    recs, fit = ex.integrate(cfg, args.integrand)
    rows = [asdict(r) for r in recs]
    extra = {"integrand": args.integrand}
    if fit is not None:
        extra["fit"] = asdict(fit)
        _log(f"slope {fit.slope:.3f} (m >= {cfg.fit_start})")
    _write_rows(cfg, "integrate", rows, extra)
    return EXIT_OK


def cmd_bound(args) -> int:
    cfg = config_from_args(args)
    cfg.validate(need_bound=True)
    w = cfg.weights()
    rows = []
    for m in cfg.m_values:
        t = args.t if args.t is not None else ex.order_beta_t(cfg, ex.source_matrices(cfg, m))
        rows.append({"m": m, "N": cfg.b ** m, "t": t,
                     "bound": theoretical_bound(cfg.alpha, cfg.beta, cfg.b, t, m, w),
                     "bound_literal": theoretical_bound(cfg.alpha, cfg.beta, cfg.b, t, m, w,
                                                        literal=True)})
    consts = bound_constants(cfg.alpha, cfg.beta, cfg.b, rows[0]["t"], w, cfg.ctau_literal)
    extra = {"constants": {"A": str(consts.A), "B": str(consts.B), "D": consts.D,
                           "C_tau": list(consts.C_tau),
                           "G": {str(k): v for k, v in consts.G.items()}}}
    _write_rows(cfg, "bound", rows, extra)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ex.CostGuardError, SearchLimitExceeded, OverflowError) as e:
        _log(f"error: {e}")
        return EXIT_GUARD
    except (InvariantFailure, ArithmeticError) as e:
        _log(f"error: {e}")
        return EXIT_INVARIANT
    except (ValueError, OSError) as e:
        _log(f"error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

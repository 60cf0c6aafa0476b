"""Command line front end.

Verbs: simulate, observability, check, sweep.  Exit codes: 0 on success,
1 on validation errors (bad flags or scenario files), 2 on numerical
failures (divergence, failed checks).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .diagnostics import run_checks
from .dynamics import DivergenceError
from .runner import emit, emit_sweep, run_observability, run_simulate, run_sweep
from .scenario import ScenarioError, parse_scenario


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dqnav",
        description="Dual quaternion relative motion simulation and observability analysis.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    sim = sub.add_parser("simulate", help="propagate a scenario and emit the trajectory")
    sim.add_argument("--scenario", required=True, help="scenario JSON file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--format", choices=["all", "csv", "json"], default="all")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    obs = sub.add_parser("observability", help="rank analysis along a scenario trajectory")
    obs.add_argument("--scenario", required=True)
    obs.add_argument("--out", required=True)
    obs.add_argument("--format", choices=["all", "csv", "json"], default="all")
    obs.add_argument("--epochs", default=None,
                     help="comma separated epoch times in seconds (default: 3 spread over the run)")
    obs.add_argument("--rank-tol", type=float, default=1e-10)
    obs.add_argument("--no-gramian", action="store_true",
                     help="skip the empirical gramian cross-check")
    obs.add_argument("--seed", type=int, default=None)

    chk = sub.add_parser("check", help="run the lemma and algebra self-check suite")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--samples", type=int, default=200)

    swp = sub.add_parser("sweep", help="randomized full-rank sweep")
    swp.add_argument("--samples", type=int, default=100)
    swp.add_argument("--seed", type=int, default=0)
    swp.add_argument("--rank-tol", type=float, default=1e-10)
    swp.add_argument("--out", required=True)
    swp.add_argument("--format", choices=["all", "csv", "json"], default="all")

    return parser


def _load_scenario(args):
    scn = parse_scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        scn = scn.with_seed(args.seed)
    return scn


def _parse_epochs(text):
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _UsageError(f"--epochs expects comma separated numbers, got {text!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.verb == "simulate":
            report = run_simulate(_load_scenario(args))
            written = emit(report, args.out, fmt=args.format)
            final = report.final_state()
            print(f"simulated {len(report.times)} epochs over "
                  f"{report.scenario.duration:g} s (scenario {report.scenario_hash[:12]})")
            print(f"final position [m]: {np.array2string(final.r, precision=6)}")
            for path in written:
                print(f"wrote {path}")

        elif args.verb == "observability":
            report = run_observability(
                _load_scenario(args),
                epochs=_parse_epochs(args.epochs),
                rank_tol=args.rank_tol,
                with_gramian=not args.no_gramian,
            )
            written = emit(report, args.out, fmt=args.format)
            for e in report.epochs:
                verdict = "full rank" if e.report.full_rank else "RANK DEFICIENT"
                print(f"t={e.time:g} s: rank {e.report.numeric_rank}/16 ({verdict}), "
                      f"sigma_min={e.report.singular_values[-1]:.3e}, "
                      f"fd residuals {e.fd_residual_l0:.1e}/{e.fd_residual_l1:.1e}")
            if report.gramian is not None:
                print(f"empirical gramian rank {report.gramian.numeric_rank()}/16 "
                      f"over {report.gramian.horizon:g} s")
            for path in written:
                print(f"wrote {path}")
            if not all(e.report.full_rank for e in report.epochs):
                return 2

        elif args.verb == "check":
            results = run_checks(seed=args.seed, samples=args.samples)
            failed = 0
            for r in results:
                tag = "PASS" if r.passed else "FAIL"
                print(f"[{tag}] {r.name}: {r.detail}")
                failed += 0 if r.passed else 1
            print(f"{len(results) - failed}/{len(results)} checks passed")
            if failed:
                return 2

        elif args.verb == "sweep":
            if args.samples < 1:
                raise _UsageError("--samples must be at least 1")
            sweep = run_sweep(args.samples, seed=args.seed, rank_tol=args.rank_tol)
            written = emit_sweep(sweep, args.out, fmt=args.format)
            print(f"{sweep.full_rank_count}/{sweep.samples} samples full rank "
                  f"(min sigma_min/sigma_max = {sweep.min_sigma_ratio:.3e})")
            for path in written:
                print(f"wrote {path}")
            if sweep.full_rank_count != sweep.samples:
                return 2

    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())

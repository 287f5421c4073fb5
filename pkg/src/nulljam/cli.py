"""Command-line interface.

Verbs:
    plan      solve the scenario's single-horizon problem and execute it
    simulate  receding-horizon replanning against (possibly moving) targets
    snapshot  emit one far-field beampattern sweep at the initial geometry
    check     run the randomized invariant suite on the scenario

Exit codes: 0 success, 2 scenario/validation error, 3 solver failure,
1 anything else.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import NulljamError, ScenarioError, SolverError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SCENARIO = 2
EXIT_SOLVER = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nulljam",
        description="Plan jointly optimal antenna phases, array orientation and "
        "UAV trajectories for directional jamming with a guaranteed client null.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, out_required=True):
        p.add_argument("--scenario", required=True, type=Path, help="scenario YAML file")
        if out_required:
            p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--resolution", type=int, default=361,
                       help="angular samples per beampattern snapshot (default 361)")

    p_plan = sub.add_parser("plan", help="solve and execute a single plan")
    add_common(p_plan)
    p_plan.add_argument("--dt", type=float, default=0.1, help="simulation step (s)")

    p_sim = sub.add_parser("simulate", help="receding-horizon replanning run")
    add_common(p_sim)
    p_sim.add_argument("--dt", type=float, default=0.1, help="simulation step (s)")
    p_sim.add_argument("--replan-interval", type=float, default=20.0,
                       help="seconds between replans (default 20)")
    p_sim.add_argument("--horizon", type=float, default=150.0,
                       help="planning horizon per replan (default 150)")
    p_sim.add_argument("--total", type=float, default=1000.0,
                       help="total mission duration (default 1000)")

    p_snap = sub.add_parser("snapshot", help="emit one beampattern snapshot")
    add_common(p_snap)

    p_check = sub.add_parser("check", help="run the invariant suite")
    p_check.add_argument("--scenario", required=True, type=Path)
    return parser


def _cmd_plan(args) -> int:
    from .reporting import run_plan
    from .scenario import load_scenario

    scenario = load_scenario(args.scenario)
    report, result = run_plan(scenario, args.out, dt=args.dt, resolution=args.resolution)
    ok = report.replans_converged == report.replans_attempted
    print(f"plan: converged={ok} cost={report.total_cost:.6g} "
          f"max|u|={report.max_control:.6g} null_ok={report.null_ok}")
    for thr, t_cross in sorted(report.first_crossing.items()):
        print(f"  crosses {thr:g} dBm at t={t_cross:.2f} s")
    if not ok:
        print("plan: solver did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_simulate(args) -> int:
    from .reporting import run_simulate
    from .scenario import load_scenario

    scenario = load_scenario(args.scenario)
    report, result = run_simulate(
        scenario, args.replan_interval, args.horizon, args.total,
        args.out, dt=args.dt, resolution=args.resolution,
    )
    print(f"simulate: replans {report.replans_converged}/{report.replans_attempted} converged, "
          f"null_ok={report.null_ok}, final power {report.final_power:.2f} dBm")
    for thr, t_cross in sorted(report.first_crossing.items()):
        print(f"  crosses {thr:g} dBm at t={t_cross:.2f} s")
    if report.replans_converged == 0:
        print("simulate: no replan converged", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_snapshot(args) -> int:
    from .reporting import emit_beampattern_snapshot, write_snapshot
    from .scenario import load_scenario
    from .simulate import apply_beam_control

    scenario = load_scenario(args.scenario)
    state = scenario.uav_initial
    client = scenario.client.position(0.0)
    eaves = scenario.eavesdropper.position(0.0)
    beam = apply_beam_control(state, client, eaves, scenario.radio, scenario.antenna_separation)
    snap = emit_beampattern_snapshot(
        state, beam, client, eaves,
        scenario.wavenumber * scenario.antenna_separation, args.resolution,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_snapshot(snap, out / "snapshot.csv")
    print(f"snapshot: theta_c={snap.theta_c:.6f} theta_e={snap.theta_e:.6f} "
          f"theta_g={snap.beam.theta_g:.6f} -> {out / 'snapshot.csv'}")
    return EXIT_OK


def _cmd_check(args) -> int:
    from .scenario import load_scenario
    from .selfcheck import run_checks

    scenario = load_scenario(args.scenario)
    results = run_checks(scenario)
    failed = False
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed |= not ok
    return EXIT_FAILURE if failed else EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "plan": _cmd_plan,
        "simulate": _cmd_simulate,
        "snapshot": _cmd_snapshot,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NulljamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

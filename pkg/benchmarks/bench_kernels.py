"""Benchmark the compiled kernel against the numpy fallback.

The shooting solver spends nearly all of its time in ``propagate`` (batched
RK4 sweeps of the 8-state optimality system), so that is what is measured,
plus a full boundary-value solve with the active backend.

Usage:
    python3 benchmarks/bench_kernels.py [--quick]
    NULLJAM_PURE_PYTHON=1 python3 benchmarks/bench_kernels.py   # solve on fallback
"""

import argparse
import math
import time

import numpy as np

import nulljam as nj
from nulljam import _kernels
from nulljam._kernels import params as kparams


def make_problem():
    radio = nj.RadioParams(600.0, 2.0 * math.pi / 0.190293)
    problem = nj.PlanningProblem(
        client=np.array([3000.0, 3000.0]),
        eavesdropper=np.array([6000.0, 6000.0]),
        radio=radio,
        separation=0.190293 / 2.0,
        activation=nj.ActivationSpec(-100.0, -70.0),
    )
    weights = nj.CostWeights(
        r=np.array([2.0 / 3.0] * 2),
        q_r=(0.1 / 300.0) * np.eye(2),
        q_f=np.zeros((2, 2)),
        a_r=math.log(10.0) / 300.0,
        a_f=0.0,
        u_bar=2.0,
        t_f=300.0,
    )
    return problem, weights


def bench(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="fewer repeats")
    args = parser.parse_args()
    repeats = 3 if args.quick else 10

    problem, weights = make_problem()
    params = kparams.pack_params(
        problem.client / 1e3, problem.eavesdropper / 1e3,
        problem.radio.wavenumber * 1e3, problem.separation / 1e3,
        problem.radio.nominal_power, weights.a_r * 300.0,
        weights.q_r * (1e6 / 300.0), weights.r * (1e6 / 300.0**3),
        weights.u_bar * 300.0**2 / 1e3, -100.0, -70.0,
    )
    rng = np.random.default_rng(0)
    y = np.column_stack(
        (
            rng.uniform(-2.0, 9.0, (256, 2)),
            rng.uniform(-10.0, 10.0, (256, 2)),
            rng.uniform(-1.0, 1.0, (256, 2)),
            rng.uniform(-200.0, 200.0, (256, 2)),
        )
    )
    dt = np.full(256, 0.005)
    nsteps = np.full(256, 8, dtype=np.int64)

    backends = ["fallback"] + (["compiled"] if _kernels.HAVE_COMPILED else [])
    print(f"active backend: {_kernels.backend_name()}")
    print(f"{'kernel':28s}" + "".join(f"{b:>14s}" for b in backends) + f"{'speedup':>10s}")

    rows = {
        "rhs_batch (256 states)": lambda impl: impl.rhs_batch(y, params),
        "propagate (256 x 8 steps)": lambda impl: impl.propagate(y, dt, nsteps, params),
        "propagate_dense (200 steps)": lambda impl: impl.propagate_dense(
            y[0], 0.005, 200, params
        ),
    }
    for name, call in rows.items():
        times = [bench(lambda impl=_kernels.get_backend(b): call(impl), repeats)
                 for b in backends]
        speedup = times[0] / times[-1] if len(times) == 2 else 1.0
        cells = "".join(f"{t * 1e6:>11.0f} us" for t in times)
        print(f"{name:28s}{cells}{speedup:>9.1f}x")

    start = time.perf_counter()
    sol = nj.solve_bvp(problem, weights, nj.UavState(np.zeros(2), np.zeros(2)))
    solve_time = time.perf_counter() - start
    print(f"\nsolve_bvp on '{_kernels.backend_name()}': {solve_time * 1e3:.0f} ms "
          f"(converged={sol.converged}, {sol.iterations} iterations, cost {sol.cost:.3f})")
    if _kernels.backend_name() == "compiled":
        print("rerun with NULLJAM_PURE_PYTHON=1 to time the solve on the fallback")


if __name__ == "__main__":
    main()

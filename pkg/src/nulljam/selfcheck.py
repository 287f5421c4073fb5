"""Fast invariant suite for the ``check`` CLI verb.

Runs randomized spot checks of the core guarantees (null depth, orientation
optimality, gradient fidelity, far-field agreement, backend consistency)
around the geometry of a given scenario.  Each check returns a (name, ok,
detail) triple; seeds come from the scenario so reruns are reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from ._kernels import params as kparams
from .beamforming import beampattern, far_field_beampattern, nulling_phase, optimal_orientation
from .geometry import ArrayGeometry, FarFieldGeometry, PlanarPoint
from .optimizer import PlanningProblem, grad_fspl
from .propagation import fspl
from .scenario import ScenarioFile


def _null_depth(scn: ScenarioFile, rng: np.ndarray, n: int = 2000):
    worst = 0.0
    base = scn.uav_initial.position
    client0 = scn.client.position(0.0)
    for _ in range(n):
        center = base + rng.uniform(-2000.0, 2000.0, 2)
        client = client0 + rng.uniform(-500.0, 500.0, 2)
        geom = ArrayGeometry(
            center=PlanarPoint(*center),
            orientation=rng.uniform(-math.pi, math.pi),
            separation=scn.antenna_separation,
            wavenumber=scn.wavenumber,
        )
        phi1 = rng.uniform(-1000.0, 1000.0)
        phi2 = nulling_phase(phi1, client, geom)
        worst = max(worst, beampattern(client, geom, phi1, phi2))
    return "null-depth", worst <= 1e-12, f"max client gain {worst:.3e} (limit 1e-12)"


def _orientation_optimality(scn: ScenarioFile, rng, n: int = 500):
    kD_scn = scn.wavenumber * scn.antenna_separation
    grid = np.linspace(-math.pi, math.pi, 3601)
    worst = 0.0
    for i in range(n):
        theta_c, theta_e = rng.uniform(-math.pi, math.pi, 2)
        kD = kD_scn if i % 2 == 0 else rng.uniform(0.1, 4.0 * math.pi)
        ff = FarFieldGeometry.from_bearings(theta_c, theta_e)
        best = far_field_beampattern(ff, optimal_orientation(ff, kD), kD)
        grid_best = float(
            np.max(2.0 - 2.0 * np.cos(2.0 * kD * ff.mu * np.sin(ff.midline - grid)))
        )
        worst = max(worst, grid_best - best)
    return "orientation-optimality", worst <= 1e-6, f"max grid shortfall {worst:.3e} (limit 1e-6)"


def _gradient_fidelity(scn: ScenarioFile, rng, n: int = 200):
    problem = PlanningProblem(
        client=scn.client.position(0.0),
        eavesdropper=scn.eavesdropper.position(0.0),
        radio=scn.radio,
        separation=scn.antenna_separation,
        activation=scn.activation,
    )
    step = 1e-3
    worst = 0.0
    kept = 0
    while kept < n:
        pg = rng.uniform(-8000.0, 8000.0, 2)
        de = problem.eavesdropper - pg
        if float(np.hypot(*de)) < 50.0 or float(np.hypot(*(problem.client - pg))) < 50.0:
            continue
        kept += 1
        g = grad_fspl(pg, problem.eavesdropper, scn.wavenumber)
        for axis in range(2):
            delta = np.zeros(2)
            delta[axis] = step
            dplus = float(np.hypot(*(problem.eavesdropper - (pg + delta))))
            dminus = float(np.hypot(*(problem.eavesdropper - (pg - delta))))
            fd = (fspl(dplus, scn.wavenumber) - fspl(dminus, scn.wavenumber)) / (2 * step)
            worst = max(worst, abs(fd - g[axis]) / max(abs(g[axis]), 1e-300))
    return "gradient-fidelity", worst <= 1e-5, f"max relative error {worst:.3e} (limit 1e-5)"


def _far_field_agreement(scn: ScenarioFile, rng, n: int = 200):
    worst = 0.0
    client0 = scn.client.position(0.0)
    for _ in range(n):
        rng_range = rng.uniform(200.0, 5000.0)
        ang_e = rng.uniform(-math.pi, math.pi)
        ang_c = ang_e + rng.uniform(0.5, math.pi)
        center = rng.uniform(-1000.0, 1000.0, 2)
        eaves = center + rng_range * np.array((math.cos(ang_e), math.sin(ang_e)))
        client = center + rng.uniform(200.0, 5000.0) * np.array((math.cos(ang_c), math.sin(ang_c)))
        ff = FarFieldGeometry.from_positions(center, client, eaves)
        kD = scn.wavenumber * scn.antenna_separation
        theta_g = optimal_orientation(ff, kD)
        approx = far_field_beampattern(ff, theta_g, kD)
        if approx < 0.5:
            continue
        geom = ArrayGeometry(
            center=PlanarPoint(*center), orientation=theta_g,
            separation=scn.antenna_separation, wavenumber=scn.wavenumber,
        )
        phi2 = nulling_phase(0.0, client, geom)
        exact = beampattern(eaves, geom, 0.0, phi2)
        worst = max(worst, abs(exact - approx) / approx)
    return "far-field-agreement", worst <= 1e-3, f"max relative error {worst:.3e} (limit 1e-3)"


def _backend_consistency(scn: ScenarioFile, rng, n: int = 200):
    if not _kernels.HAVE_COMPILED:
        return "backend-consistency", True, "compiled kernel absent; fallback only"
    problem_params = kparams.pack_params(
        scn.client.position(0.0),
        scn.eavesdropper.position(0.0),
        scn.wavenumber,
        scn.antenna_separation,
        scn.nominal_power,
        scn.weights.a_r,
        scn.weights.q_r,
        scn.weights.r,
        scn.weights.u_bar,
        scn.activation.lower,
        scn.activation.upper,
    )
    y = np.column_stack(
        (
            rng.uniform(-9000.0, 9000.0, (n, 2)),
            rng.uniform(-60.0, 60.0, (n, 2)),
            rng.uniform(-1e-3, 1e-3, (n, 2)),
            rng.uniform(-2.0, 2.0, (n, 2)),
        )
    )
    a = _kernels.get_backend("compiled").rhs_batch(y, problem_params)
    b = _kernels.get_backend("fallback").rhs_batch(y, problem_params)
    scale = np.maximum(np.abs(a), 1.0)
    worst = float(np.max(np.abs(a - b) / scale))
    return "backend-consistency", worst <= 1e-12, f"max relative deviation {worst:.3e} (limit 1e-12)"


def run_checks(scn: ScenarioFile):
    """All invariant checks; returns a list of (name, ok, detail)."""
    rng = np.random.default_rng(scn.seed)
    return [
        _null_depth(scn, rng),
        _orientation_optimality(scn, rng),
        _gradient_fidelity(scn, rng),
        _far_field_agreement(scn, rng),
        _backend_consistency(scn, rng),
    ]

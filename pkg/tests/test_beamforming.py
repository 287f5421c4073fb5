import cmath
import math

import numpy as np
import pytest

from nulljam.beamforming import (
    BeamControl,
    beampattern,
    doppler_phase,
    far_field_beampattern,
    nulling_phase,
    optimal_beampattern,
    optimal_orientation,
)
from nulljam.errors import DegenerateGeometryError, InvalidInputError
from nulljam.geometry import ArrayGeometry, FarFieldGeometry, PlanarPoint, wrap_angle


def random_geometry(rng, sep_range=(0.01, 2.0), k_range=(0.5, 60.0)):
    return ArrayGeometry(
        center=PlanarPoint(*rng.uniform(-50.0, 50.0, 2)),
        orientation=rng.uniform(-math.pi, math.pi),
        separation=rng.uniform(*sep_range),
        wavenumber=rng.uniform(*k_range),
    )


def phasor_gain(point, geom, phi1, phi2):
    # independent oracle: the literal magnitude-squared phasor sum
    d1, d2 = geom.element_distances(point)
    total = cmath.exp(1j * (geom.wavenumber * d1 + phi1)) + cmath.exp(
        1j * (geom.wavenumber * d2 + phi2)
    )
    return abs(total) ** 2


def test_beampattern_in_phase_symmetry():
    geom = ArrayGeometry(PlanarPoint(0.0, 0.0), 0.0, 1.0, 2 * math.pi)
    # any point on the perpendicular bisector is equidistant
    assert beampattern((0.0, 7.5), geom, 0.3, 0.3) == pytest.approx(4.0, abs=1e-12)


def test_beampattern_antiphase_cancellation():
    geom = ArrayGeometry(PlanarPoint(0.0, 0.0), 0.0, 1.0, 2 * math.pi)
    assert beampattern((0.0, 7.5), geom, 0.3, 0.3 + math.pi) == pytest.approx(0.0, abs=1e-12)


def test_beampattern_matches_phasor_oracle():
    # elements at (0,0) and (1,0), observation at (0,10), k = 2*pi
    geom = ArrayGeometry(PlanarPoint(0.5, 0.0), 0.0, 1.0, 2 * math.pi)
    np.testing.assert_allclose(geom.element_1, [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(geom.element_2, [1.0, 0.0], atol=1e-15)
    value = beampattern((0.0, 10.0), geom, 0.0, 0.0)
    assert value == pytest.approx(2.0 + 2.0 * math.cos(2 * math.pi * (10.0 - math.sqrt(101.0))), rel=1e-12)
    assert value == pytest.approx(3.902595442506727, rel=1e-12)
    assert value == pytest.approx(phasor_gain((0.0, 10.0), geom, 0.0, 0.0), rel=1e-9)


def test_beampattern_bounded_and_matches_oracle_randomized():
    rng = np.random.default_rng(11)
    for _ in range(500):
        geom = random_geometry(rng)
        p = rng.uniform(-60.0, 60.0, 2)
        phi1, phi2 = rng.uniform(-20.0, 20.0, 2)
        try:
            g = beampattern(p, geom, phi1, phi2)
        except DegenerateGeometryError:
            continue
        assert 0.0 <= g <= 4.0
        assert g == pytest.approx(phasor_gain(p, geom, phi1, phi2), abs=1e-9)


def test_beampattern_on_element_raises():
    geom = ArrayGeometry(PlanarPoint(0.0, 0.0), 0.0, 1.0, 1.0)
    with pytest.raises(DegenerateGeometryError):
        beampattern(tuple(geom.element_1), geom, 0.0, 0.0)


def test_nulling_phase_bisector_gives_pi():
    geom = ArrayGeometry(PlanarPoint(0.0, 0.0), 0.0, 2.0, 5.0)
    phi2 = nulling_phase(0.0, (0.0, 9.0), geom)  # equidistant client
    assert phi2 == pytest.approx(math.pi, abs=1e-12)


def test_nulling_phase_half_turn_path_difference():
    # client collinear with the elements: d1 - d2 equals the separation, so
    # k (d1 - d2) = pi for k = 1, D = pi and phi2 = 2*pi (0 once wrapped)
    geom = ArrayGeometry(PlanarPoint(0.0, 0.0), 0.0, math.pi, 1.0)
    phi2 = nulling_phase(0.0, (20.0, 0.0), geom)
    assert phi2 == pytest.approx(2 * math.pi, abs=1e-12)
    assert wrap_angle(phi2) == pytest.approx(0.0, abs=1e-12)


def test_null_depth_randomized():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(2000):
        geom = random_geometry(rng)
        client = rng.uniform(-60.0, 60.0, 2)
        phi1 = rng.uniform(-300.0, 300.0)
        try:
            phi2 = nulling_phase(phi1, client, geom)
        except DegenerateGeometryError:
            continue
        worst = max(worst, beampattern(client, geom, phi1, phi2))
    assert worst <= 1e-12


def test_phi1_invariance_of_gain():
    # shifting phi1 and recomputing phi2 leaves the pattern unchanged
    rng = np.random.default_rng(13)
    for _ in range(200):
        geom = random_geometry(rng)
        client = rng.uniform(-60.0, 60.0, 2)
        probe = rng.uniform(-60.0, 60.0, 2)
        try:
            base = beampattern(probe, geom, 0.0, nulling_phase(0.0, client, geom))
            phi1 = rng.uniform(-40.0, 40.0)
            moved = beampattern(probe, geom, phi1, nulling_phase(phi1, client, geom))
        except DegenerateGeometryError:
            continue
        assert moved == pytest.approx(base, abs=1e-12)


def test_doppler_phase_zero_velocity():
    samples = [(t, (0.0, 0.0), (100.0 * t, 50.0)) for t in np.linspace(0.0, 10.0, 21)]
    assert doppler_phase(samples, (5000.0, 50.0), 33.0) == 0.0


def test_doppler_phase_radial_approach_closed_form():
    # constant speed s straight toward the eavesdropper: phi1 = -k s t
    k, speed, t_end = 33.0, 12.0, 40.0
    eaves = np.array([10000.0, 0.0])
    times = np.linspace(0.0, t_end, 81)
    samples = [(t, (speed, 0.0), (speed * t, 0.0)) for t in times]
    assert doppler_phase(samples, eaves, k) == pytest.approx(-k * speed * t_end, rel=1e-12)


def test_doppler_phase_perpendicular_velocity():
    # motion always perpendicular to the line of sight contributes nothing
    k = 21.0
    eaves = np.array([0.0, 0.0])
    radius = 500.0
    times = np.linspace(0.0, 5.0, 51)
    samples = []
    for t in times:
        ang = 0.3 * t
        pos = radius * np.array([math.cos(ang), math.sin(ang)])
        vel = 0.3 * radius * np.array([-math.sin(ang), math.cos(ang)])
        samples.append((t, vel, pos))
    assert doppler_phase(samples, eaves, k) == pytest.approx(0.0, abs=1e-9)


def test_doppler_phase_rejects_non_monotone_times():
    samples = [(0.0, (1.0, 0.0), (0.0, 0.0)), (1.0, (1.0, 0.0), (1.0, 0.0)),
               (0.5, (1.0, 0.0), (2.0, 0.0))]
    with pytest.raises(InvalidInputError):
        doppler_phase(samples, (100.0, 0.0), 1.0)


def test_doppler_phase_rejects_coincident_uav():
    with pytest.raises(DegenerateGeometryError):
        doppler_phase([(0.0, (1.0, 0.0), (7.0, 7.0))], (7.0, 7.0), 1.0)


def test_far_field_zero_for_coincident_directions():
    ff = FarFieldGeometry.from_bearings(0.7, 0.7)
    for theta_g in np.linspace(-math.pi, math.pi, 17):
        assert far_field_beampattern(ff, theta_g, 2.0) == pytest.approx(0.0, abs=1e-14)


def test_far_field_quarter_turn_example():
    # kD = pi, theta_c = 0, theta_e = pi/2, theta_g = 0: argument is -pi
    ff = FarFieldGeometry.from_bearings(0.0, math.pi / 2)
    assert far_field_beampattern(ff, 0.0, math.pi) == pytest.approx(4.0, abs=1e-12)


def test_far_field_agrees_with_exact_at_range():
    # nulling phases substituted, compared at the eavesdropper, GPS-band radio
    rng = np.random.default_rng(14)
    wavelength, separation = 0.19029, 0.0952
    k = 2 * math.pi / wavelength
    kD = k * separation
    worst = 0.0
    for _ in range(300):
        center = rng.uniform(-20.0, 20.0, 2)
        ang_c = rng.uniform(-math.pi, math.pi)
        ang_e = ang_c + rng.uniform(0.4, 2 * math.pi - 0.4)
        client = center + rng.uniform(100.0, 3000.0) * np.array([math.cos(ang_c), math.sin(ang_c)])
        eaves = center + rng.uniform(100.0, 3000.0) * np.array([math.cos(ang_e), math.sin(ang_e)])
        ff = FarFieldGeometry.from_positions(center, client, eaves)
        theta_g = optimal_orientation(ff, kD)
        approx = far_field_beampattern(ff, theta_g, kD)
        if approx < 0.5:
            continue
        geom = ArrayGeometry(PlanarPoint(*center), theta_g, separation, k)
        exact = beampattern(eaves, geom, 0.0, nulling_phase(0.0, client, geom))
        worst = max(worst, abs(exact - approx) / approx)
    assert worst <= 1e-3


def test_far_field_error_shrinks_with_range():
    # average far-field error decreases as both targets recede
    rng = np.random.default_rng(15)
    wavelength, separation = 0.19029, 0.0952
    k = 2 * math.pi / wavelength
    kD = k * separation
    ranges = [20.0, 100.0, 500.0, 2500.0]
    means = []
    for dist in ranges:
        errs = []
        for _ in range(150):
            ang_c = rng.uniform(-math.pi, math.pi)
            ang_e = ang_c + rng.uniform(0.6, 2 * math.pi - 0.6)
            client = dist * np.array([math.cos(ang_c), math.sin(ang_c)])
            eaves = dist * np.array([math.cos(ang_e), math.sin(ang_e)])
            ff = FarFieldGeometry.from_positions((0.0, 0.0), client, eaves)
            theta_g = optimal_orientation(ff, kD)
            approx = far_field_beampattern(ff, theta_g, kD)
            if approx < 0.5:
                continue
            geom = ArrayGeometry(PlanarPoint(0.0, 0.0), theta_g, separation, k)
            exact = beampattern(eaves, geom, 0.0, nulling_phase(0.0, client, geom))
            errs.append(abs(exact - approx) / approx)
        means.append(np.mean(errs))
    assert all(a > b for a, b in zip(means, means[1:]))


def test_optimal_orientation_coincident_directions():
    ff = FarFieldGeometry.from_bearings(0.0, 0.0)
    for kD in (0.3, math.pi, 7.0):
        theta_g = optimal_orientation(ff, kD)
        assert abs(theta_g) == pytest.approx(math.pi / 2, abs=1e-12)
        assert far_field_beampattern(ff, theta_g, kD) == pytest.approx(0.0, abs=1e-14)


def test_optimal_orientation_quarter_turn_example():
    ff = FarFieldGeometry.from_bearings(0.0, math.pi / 2)
    kD = math.pi
    plus = optimal_orientation(ff, kD)
    minus = optimal_orientation(ff, kD, previous_theta_g=0.0)
    assert sorted((plus, minus)) == pytest.approx([0.0, math.pi / 2], abs=1e-12)
    assert far_field_beampattern(ff, plus, kD) == pytest.approx(4.0, abs=1e-9)


def test_optimal_orientation_sub_threshold_case():
    # |mu| = 0.4 < 1/2 at kD = pi: offset is a quarter turn, gain 2 - 2cos(0.8 pi)
    ff = FarFieldGeometry(theta_c=0.0, theta_e=0.0, mu=0.4, midline=1.0)
    theta_g = optimal_orientation(ff, math.pi)
    assert theta_g == pytest.approx(1.0 + math.pi / 2, abs=1e-12)
    gain = far_field_beampattern(ff, theta_g, math.pi)
    assert gain == pytest.approx(2.0 - 2.0 * math.cos(0.8 * math.pi), rel=1e-12)
    assert gain == pytest.approx(3.618033988749895, rel=1e-12)


def test_optimal_orientation_grid_oracle():
    rng = np.random.default_rng(16)
    grid = np.linspace(-math.pi, math.pi, 3601)
    for _ in range(1000):
        tc, te = rng.uniform(-math.pi, math.pi, 2)
        kD = rng.uniform(0.1, 4 * math.pi)
        ff = FarFieldGeometry.from_bearings(tc, te)
        best = far_field_beampattern(ff, optimal_orientation(ff, kD), kD)
        grid_best = float(np.max(2.0 - 2.0 * np.cos(2.0 * kD * ff.mu * np.sin(ff.midline - grid))))
        assert best >= grid_best - 1e-6


def test_optimal_orientation_branch_symmetry():
    rng = np.random.default_rng(17)
    for _ in range(500):
        tc, te = rng.uniform(-math.pi, math.pi, 2)
        kD = rng.uniform(0.1, 4 * math.pi)
        ff = FarFieldGeometry.from_bearings(tc, te)
        plus = optimal_orientation(ff, kD)
        # force the other branch via a previous angle near it
        amu = abs(ff.mu)
        offset = math.pi / 2 if amu < math.pi / (2 * kD) else math.asin(math.pi / (2 * kD * amu))
        minus = wrap_angle(ff.midline - offset)
        assert far_field_beampattern(ff, plus, kD) == pytest.approx(
            far_field_beampattern(ff, minus, kD), abs=1e-12
        )


def test_optimal_orientation_tie_break_follows_previous():
    ff = FarFieldGeometry.from_bearings(0.3, 1.1)
    kD = 2.0
    plus = optimal_orientation(ff, kD)
    held = optimal_orientation(ff, kD, previous_theta_g=plus + 0.05)
    assert held == plus
    other = optimal_orientation(ff, kD, previous_theta_g=2 * ff.midline - plus - 0.05)
    assert other != plus
    assert abs(wrap_angle(other + plus - 2 * ff.midline)) < 1e-9


def test_optimal_beampattern_cases():
    assert optimal_beampattern(FarFieldGeometry.from_bearings(1.0, 1.0), 2.0) == 0.0
    wide = FarFieldGeometry(theta_c=0.0, theta_e=0.0, mu=0.8, midline=0.0)
    assert optimal_beampattern(wide, math.pi) == 4.0
    mid = FarFieldGeometry(theta_c=0.0, theta_e=0.0, mu=0.4, midline=0.0)
    assert optimal_beampattern(mid, math.pi) == pytest.approx(3.618033988749895, rel=1e-12)


def test_optimal_beampattern_continuous_at_threshold():
    for kD in (1.0, math.pi, 9.0):
        mu_star = math.pi / (2 * kD)
        if mu_star > 1.0:
            continue
        below = optimal_beampattern(
            FarFieldGeometry(0.0, 0.0, mu=mu_star * (1 - 1e-9), midline=0.0), kD
        )
        at = optimal_beampattern(FarFieldGeometry(0.0, 0.0, mu=mu_star, midline=0.0), kD)
        assert at == 4.0
        assert below == pytest.approx(4.0, abs=1e-12)


def test_beam_control_wrapped_constructor():
    bc = BeamControl.wrapped(7.0 * math.pi, -5.5 * math.pi, 2.5 * math.pi)
    for angle in (bc.phi1, bc.phi2, bc.theta_g):
        assert -math.pi < angle <= math.pi

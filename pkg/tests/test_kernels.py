import numpy as np
import pytest

import nulljam as nj
from nulljam import _kernels
from nulljam._kernels import fallback
from nulljam._kernels import params as kparams
from nulljam.optimizer import adjoint as adj

BACKENDS = ["fallback"] + (["compiled"] if _kernels.HAVE_COMPILED else [])


@pytest.fixture(scope="module")
def problem_params(gps_problem, gps_weights):
    return kparams.pack_params(
        gps_problem.client,
        gps_problem.eavesdropper,
        gps_problem.radio.wavenumber,
        gps_problem.separation,
        gps_problem.radio.nominal_power,
        gps_weights.a_r,
        gps_weights.q_r,
        gps_weights.r,
        gps_weights.u_bar,
        gps_problem.activation.lower,
        gps_problem.activation.upper,
    )


def random_states(rng, n):
    return np.column_stack(
        (
            rng.uniform(-9000.0, 9000.0, (n, 2)),
            rng.uniform(-60.0, 60.0, (n, 2)),
            rng.uniform(-1e-3, 1e-3, (n, 2)),
            rng.uniform(-3.0, 3.0, (n, 2)),  # wide enough to saturate the control
        )
    )


def test_backend_selection_exposes_interface():
    assert _kernels.backend_name() in ("compiled", "fallback")
    for name in BACKENDS:
        backend = _kernels.get_backend(name)
        assert hasattr(backend, "rhs_batch")
        assert hasattr(backend, "propagate")
        assert hasattr(backend, "propagate_dense")


@pytest.mark.parametrize("backend", BACKENDS)
def test_rhs_matches_pure_python_composition(backend, problem_params, gps_problem, gps_weights):
    impl = _kernels.get_backend(backend)
    rng = np.random.default_rng(40)
    y = random_states(rng, 400)
    out = impl.rhs_batch(y, problem_params)
    for i in range(0, 400, 7):
        row = y[i]
        state = nj.UavState(row[:2], row[2:4])
        costate = nj.Costate(row[4:6], row[6:8])
        u = adj.control_from_costate(costate, gps_weights)
        terms = nj.adjoint_terms(state, gps_problem)
        xi_p_dot, xi_v_dot = adj.costate_flow(state, costate, terms, gps_weights)
        expected = np.concatenate((row[2:4], u, xi_p_dot, xi_v_dot))
        scale = np.maximum(np.abs(expected), 1.0)
        np.testing.assert_allclose(out[i] / scale, expected / scale, atol=1e-13)


@pytest.mark.skipif(not _kernels.HAVE_COMPILED, reason="compiled kernel unavailable")
def test_compiled_and_fallback_agree(problem_params):
    rng = np.random.default_rng(41)
    y = random_states(rng, 500)
    a = _kernels.get_backend("compiled").rhs_batch(y, problem_params)
    b = fallback.rhs_batch(y, problem_params)
    scale = np.maximum(np.abs(a), 1.0)
    assert float(np.max(np.abs(a - b) / scale)) <= 1e-12

    dt = np.full(y.shape[0], 0.37)
    nsteps = np.full(y.shape[0], 5, dtype=np.int64)
    pa = _kernels.get_backend("compiled").propagate(y, dt, nsteps, problem_params)
    pb = fallback.propagate(y, dt, nsteps, problem_params)
    scale = np.maximum(np.abs(pa), 1.0)
    assert float(np.max(np.abs(pa - pb) / scale)) <= 1e-11


def test_smoothed_saturation_properties():
    u_bar = 2.0
    w = np.linspace(-40.0, 40.0, 2001)
    for sharpness in (8.0, 32.0, 128.0):
        f = fallback._saturate(w, u_bar, sharpness)
        assert np.all(np.abs(f) <= u_bar)
        assert np.all(np.diff(f) >= -1e-12)  # monotone
        np.testing.assert_allclose(f, -f[::-1], atol=1e-14)  # odd
    # sharpness 128 is numerically the exact law away from the corner
    f = fallback._saturate(w, u_bar, 128.0)
    exact = np.clip(w, -u_bar, u_bar)
    inner = np.abs(w) < 0.9 * u_bar
    outer = np.abs(w) > 1.1 * u_bar
    np.testing.assert_allclose(f[inner], exact[inner], atol=1e-14)
    np.testing.assert_allclose(f[outer], exact[outer], atol=1e-3)


@pytest.mark.parametrize("backend", BACKENDS)
def test_propagate_exact_on_polynomial_dynamics(backend, gps_problem):
    # a_r = 0 and q_r = 0 make the augmented system polynomial in time
    # (constant costates, piecewise-linear control when unsaturated), which
    # RK4 integrates exactly
    impl = _kernels.get_backend(backend)
    params = kparams.pack_params(
        gps_problem.client, gps_problem.eavesdropper,
        gps_problem.radio.wavenumber, gps_problem.separation,
        gps_problem.radio.nominal_power,
        a_r=0.0, q_r=np.zeros((2, 2)), r=np.array([2.0, 2.0]),
        u_bar=10.0, sigma_lower=-100.0, sigma_upper=-70.0,
    )
    y0 = np.array([[10.0, -5.0, 2.0, 1.0, 0.3, -0.2, 0.8, 0.1]])
    t_end = 3.0
    out = impl.propagate(y0, np.array([t_end / 30]), np.array([30], dtype=np.int64), params)[0]
    # closed form: xi_p const, xi_v(t) = xi_v0 - xi_p t, u = -xi_v / r
    xi_p0 = y0[0, 4:6]
    xi_v0 = y0[0, 6:8]
    xi_v = xi_v0 - xi_p0 * t_end
    u0 = -xi_v0 / 2.0
    # v(t) = v0 + u0 t + (xi_p/(2r)) t^2 ; p(t) = p0 + v0 t + u0 t^2/2 + xi_p t^3 / (6 r)
    v = y0[0, 2:4] + u0 * t_end + xi_p0 / 4.0 * t_end**2
    p = y0[0, 0:2] + y0[0, 2:4] * t_end + 0.5 * u0 * t_end**2 + xi_p0 / 12.0 * t_end**3
    np.testing.assert_allclose(out[0:2], p, rtol=1e-12)
    np.testing.assert_allclose(out[2:4], v, rtol=1e-12)
    np.testing.assert_allclose(out[4:6], xi_p0, rtol=1e-15)
    np.testing.assert_allclose(out[6:8], xi_v, rtol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_propagate_heterogeneous_steps(backend, problem_params):
    impl = _kernels.get_backend(backend)
    rng = np.random.default_rng(42)
    y = random_states(rng, 6)
    dt = rng.uniform(0.05, 0.3, 6)
    nsteps = np.array([1, 3, 8, 2, 5, 13], dtype=np.int64)
    batched = impl.propagate(y, dt, nsteps, problem_params)
    for i in range(6):
        single = impl.propagate(y[i : i + 1], dt[i : i + 1], nsteps[i : i + 1], problem_params)
        np.testing.assert_allclose(batched[i], single[0], rtol=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_propagate_dense_endpoints(backend, problem_params):
    impl = _kernels.get_backend(backend)
    rng = np.random.default_rng(43)
    y0 = random_states(rng, 1)[0]
    path = impl.propagate_dense(y0, 0.21, 9, problem_params)
    assert path.shape == (10, 8)
    np.testing.assert_allclose(path[0], y0, rtol=0, atol=0)
    final = impl.propagate(y0[None, :], np.array([0.21]), np.array([9], dtype=np.int64),
                           problem_params)
    np.testing.assert_allclose(path[-1], final[0], rtol=1e-14)


def test_pack_params_layout(gps_problem, gps_weights):
    params = kparams.pack_params(
        gps_problem.client, gps_problem.eavesdropper,
        gps_problem.radio.wavenumber, gps_problem.separation,
        gps_problem.radio.nominal_power, gps_weights.a_r,
        gps_weights.q_r, gps_weights.r, gps_weights.u_bar,
        -100.0, -70.0,
    )
    assert params.shape == (kparams.N_PARAMS,)
    assert params[kparams.CLIENT_X] == 3000.0
    assert params[kparams.EAVES_Y] == 6000.0
    assert params[kparams.U_BAR] == 2.0
    assert params[kparams.SAT_SHARPNESS] == 0.0

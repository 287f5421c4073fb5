import math
from pathlib import Path

import numpy as np
import pytest

import nulljam as nj
from nulljam.simulate import Mission, TargetMotion

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

GPS_WAVELENGTH = 299_792_458.0 / 1575.42e6
GPS_SEPARATION = GPS_WAVELENGTH / 2.0


@pytest.fixture(scope="session")
def gps_radio():
    return nj.RadioParams(nominal_power=600.0, wavenumber=2.0 * math.pi / GPS_WAVELENGTH)


@pytest.fixture(scope="session")
def gps_problem(gps_radio):
    return nj.PlanningProblem(
        client=np.array([3000.0, 3000.0]),
        eavesdropper=np.array([6000.0, 6000.0]),
        radio=gps_radio,
        separation=GPS_SEPARATION,
        activation=nj.ActivationSpec(-100.0, -70.0),
    )


@pytest.fixture(scope="session")
def gps_weights():
    t_f = 300.0
    return nj.CostWeights(
        r=np.array([200.0 / t_f] * 2),
        q_r=(0.1 / t_f) * np.eye(2),
        q_f=np.zeros((2, 2)),
        a_r=math.log(10.0) / t_f,
        a_f=0.0,
        u_bar=2.0,
        t_f=t_f,
    )


@pytest.fixture(scope="session")
def static_scenario_path():
    return SCENARIO_DIR / "static_gps.yaml"


@pytest.fixture(scope="session")
def moving_scenario_path():
    return SCENARIO_DIR / "moving_gps.yaml"


@pytest.fixture(scope="session")
def static_solution(gps_problem, gps_weights):
    """The solved static GPS scenario, shared by the solver tests."""
    return nj.solve_bvp(
        gps_problem, gps_weights, nj.UavState(np.zeros(2), np.zeros(2))
    )


@pytest.fixture(scope="session")
def static_mission(gps_radio, gps_weights):
    return Mission(
        client=TargetMotion.static((3000.0, 3000.0)),
        eavesdropper=TargetMotion.static((6000.0, 6000.0)),
        uav_initial=nj.UavState(np.zeros(2), np.zeros(2)),
        radio=gps_radio,
        separation=GPS_SEPARATION,
        activation=nj.ActivationSpec(-100.0, -70.0),
        weights=gps_weights,
    )

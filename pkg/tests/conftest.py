import numpy as np
import pytest

from src.channel import ChannelParams, LinkGains
from src.experiment_config import ExperimentConfig
from src.geometry import Position3D, build_grid
from src.scenario import Scenario, TerrestrialUE


@pytest.fixture(scope="session")
def grid():
    """The default 37-cell layout"""
    return build_grid(3, 800.0, 25.0)


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(2, 800.0, 25.0)


@pytest.fixture
def params():
    return ChannelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_scenario(grid, n_rbs, placements, serving_bs=1, q=1, uav_pos=None):
    """Scenario with one UE at the center of each (cell, rb) in placements"""
    ues = tuple(TerrestrialUE(cell, rb, grid.center(cell)) for cell, rb in placements)
    occupancy = [set() for _ in range(n_rbs)]
    for cell, rb in placements:
        occupancy[rb].add(cell)
    return Scenario(
        grid=grid,
        n_rbs=n_rbs,
        ues=ues,
        occupancy=tuple(frozenset(cells) for cells in occupancy),
        uav_pos=uav_pos or Position3D(0.0, 0.0, 200.0),
        serving_bs=serving_bs,
        q=q,
    )


def make_gains(num_cells, n_rbs, f=1e-9, s=None):
    f = np.full((num_cells, n_rbs), f) if np.isscalar(f) else np.asarray(f, dtype=float)
    s = np.zeros((num_cells, n_rbs)) if s is None else np.asarray(s, dtype=float)
    return LinkGains(f=f, g=f.copy(), s=s)


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def gains_factory():
    return make_gains


@pytest.fixture
def small_config():
    """A quick experiment on the 19-cell layout"""
    return ExperimentConfig(
        tiers=2,
        n_rbs=15,
        n_ues=20,
        n_d=1,
        n_u=3,
        m_d=[3, 6],
        m_u=[5],
        p_dl_dbm=[30.0, 40.0],
        gamma_u_dbm=[-100.0, -80.0],
        realizations=6,
        master_seed=7,
        mode="pure-los",
    )

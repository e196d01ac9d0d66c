import json
from dataclasses import replace
from typing import Optional, get_type_hints

import numpy as np
import pytest

from src.errors import InfeasibleOccupancyError, InvalidParameterError
from src.geometry import HexGrid, Position3D, build_grid, neighbor_set
from src.scenario import Scenario, associate, available_rbs, generate_scenario


def _occupancy_ok(scenario, q):
    matrix = scenario.grid.neighbor_matrix(q)
    for cells in scenario.occupancy:
        for a in cells:
            for b in cells:
                if a != b and matrix[a - 1, b - 1]:
                    return False
    return True


def test_default_snapshot(grid):
    rng = np.random.default_rng(0)
    for _ in range(50):
        scenario = generate_scenario(grid, 30, 60, 1, 200.0, rng)
        assert len(scenario.ues) == 60
        assert _occupancy_ok(scenario, 1)
        assert sum(len(cells) for cells in scenario.occupancy) == 60
        for ue in scenario.ues:
            assert ue.cell in scenario.occupancy[ue.rb]
            assert grid.contains(ue.cell, ue.pos.x, ue.pos.y)
            assert ue.pos.z == 0.0
        assert scenario.uav_pos.z == 200.0
        assert grid.contains(1, scenario.uav_pos.x, scenario.uav_pos.y)


def test_serving_bs_is_nearest(grid):
    rng = np.random.default_rng(1)
    for _ in range(20):
        scenario = generate_scenario(grid, 30, 60, 1, 200.0, rng)
        distances = [grid.bs_position(j).distance_to(scenario.uav_pos) for j in grid.cell_ids]
        assert scenario.serving_bs == int(np.argmin(distances)) + 1


def test_association_tie_goes_to_lowest_id(grid):
    midpoint = Position3D(grid.inter_site_distance_m / 2, 0.0, 200.0)
    assert associate(grid, midpoint) == 1


def test_empty_network(grid):
    scenario = generate_scenario(grid, 30, 0, 1, 200.0, np.random.default_rng(2))
    assert all(not cells for cells in scenario.occupancy)
    for j in (1, 7, 37):
        assert available_rbs(scenario, j) == set(range(30))


def test_zero_tiers_fills_every_cell():
    grid = build_grid(3, 800.0, 25.0)
    scenario = generate_scenario(grid, 1, 37, 0, 200.0, np.random.default_rng(3))
    assert scenario.occupancy[0] == frozenset(range(1, 38))


def test_available_rbs_respects_neighbors(grid, scenario_factory):
    # RB 0 used by a first-tier neighbor, RB 1 only by a tier-3 cell
    scenario = scenario_factory(grid, 3, [(2, 0), (30, 1)])
    assert available_rbs(scenario, 1) == {1, 2}
    assert 30 not in neighbor_set(grid, 1, 1)


def test_available_rbs_zero_tiers(grid, scenario_factory):
    scenario = scenario_factory(grid, 3, [(2, 0), (1, 2)], q=0)
    assert available_rbs(scenario, 1) == {0, 1}
    assert available_rbs(scenario, 2) == {1, 2}


def test_available_rbs_shrink_with_q(grid):
    rng = np.random.default_rng(4)
    for _ in range(20):
        scenario = generate_scenario(grid, 30, 60, 1, 200.0, rng)
        wider = replace(scenario, q=2)
        for j in (1, 4, 12):
            assert available_rbs(wider, j) <= available_rbs(scenario, j)


def test_unconstrained_allows_adjacent_reuse():
    grid = build_grid(1, 800.0, 25.0)
    scenario = generate_scenario(grid, 3, 21, 1, 200.0, np.random.default_rng(5),
                                 constrain_occupancy=False)
    # Every (cell, RB) pair used exactly once
    assert all(cells == frozenset(range(1, 8)) for cells in scenario.occupancy)


def test_infeasible_occupancy():
    grid = build_grid(0, 800.0, 25.0)
    with pytest.raises(InfeasibleOccupancyError) as info:
        generate_scenario(grid, 2, 3, 1, 200.0, np.random.default_rng(6), max_attempts=50)
    assert info.value.placed == 2
    assert info.value.requested == 3


def test_invalid_arguments(grid):
    rng = np.random.default_rng(7)
    with pytest.raises(InvalidParameterError):
        generate_scenario(grid, 0, 10, 1, 200.0, rng)
    with pytest.raises(InvalidParameterError):
        generate_scenario(grid, 30, -1, 1, 200.0, rng)
    scenario = generate_scenario(grid, 30, 10, 1, 200.0, rng)
    with pytest.raises(InvalidParameterError):
        available_rbs(scenario, 0)


def test_snapshot_to_dict(grid):
    scenario = generate_scenario(grid, 30, 60, 1, 200.0, np.random.default_rng(8))
    snapshot = json.loads(json.dumps(scenario.to_dict()))
    assert len(snapshot["cells"]) == 37
    assert len(snapshot["ues"]) == 60
    assert sorted(snapshot["occupancy"], key=int) == [str(n) for n in range(30)]
    assert snapshot["serving_bs"] == scenario.serving_bs
    assert snapshot["uav"]["z"] == 200.0


def test_same_stream_same_snapshot(grid):
    first = generate_scenario(grid, 30, 60, 1, 200.0, np.random.default_rng(9))
    second = generate_scenario(grid, 30, 60, 1, 200.0, np.random.default_rng(9))
    assert first.to_dict() == second.to_dict()


def test_scenario_field_types():
    hints = get_type_hints(Scenario)
    assert hints["grid"] is HexGrid
    assert hints["seed"] == Optional[int]
    assert hints["index"] == Optional[int]

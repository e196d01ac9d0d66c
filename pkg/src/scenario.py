"""
Network snapshot generation: terrestrial UE placement, RB occupancy,
UAV placement and UAV-BS association
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.errors import InfeasibleOccupancyError, InvalidParameterError
from src.geometry import HexGrid, Position3D, sample_uniform_in_cell

logger = logging.getLogger(__name__)

DEFAULT_PLACEMENT_ATTEMPTS = 10_000


@dataclass(frozen=True)
class TerrestrialUE:
    cell: int
    rb: int
    pos: Position3D


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    One snapshot of the network.

    RB indices run from 0 to n_rbs - 1; cell ids from 1 to J.
    occupancy[n] is the set of cells with a terrestrial UE on RB n.
    """
    grid: HexGrid
    n_rbs: int
    ues: tuple
    occupancy: tuple = field(repr=False)
    uav_pos: Position3D
    serving_bs: int
    q: int
    seed: Optional[int] = None
    index: Optional[int] = None

    def occupancy_matrix(self):
        """Boolean (J, N) matrix of occupied (cell, RB) pairs"""
        matrix = np.zeros((self.grid.num_cells, self.n_rbs), dtype=bool)
        for ue in self.ues:
            matrix[ue.cell - 1, ue.rb] = True
        return matrix

    def to_dict(self):
        """JSON-compatible snapshot for debugging and golden files"""
        return {
            "seed": self.seed,
            "index": self.index,
            "n_rbs": self.n_rbs,
            "q": self.q,
            "cell_radius_m": self.grid.cell_radius_m,
            "bs_height_m": self.grid.bs_height_m,
            "cells": [
                {"id": j, "x": float(x), "y": float(y)}
                for j, (x, y) in zip(self.grid.cell_ids, self.grid.centers)
            ],
            "ues": [
                {"cell": ue.cell, "rb": ue.rb, "x": ue.pos.x, "y": ue.pos.y, "z": ue.pos.z}
                for ue in self.ues
            ],
            "occupancy": {str(n): sorted(cells) for n, cells in enumerate(self.occupancy)},
            "uav": {"x": self.uav_pos.x, "y": self.uav_pos.y, "z": self.uav_pos.z},
            "serving_bs": self.serving_bs,
        }


def associate(grid, uav_pos):
    """Serving BS with the smallest LoS path loss, ties to the lowest cell id"""
    distances = np.sqrt(((grid.bs_positions() - uav_pos.as_array()) ** 2).sum(axis=1))
    # argmin returns the first minimum, i.e. the lowest cell id
    return int(np.argmin(distances)) + 1


def _place_ues(grid, n_rbs, n_ues, q, rng, constrain, max_attempts):
    blocked_by = grid.neighbor_matrix(q) if constrain else np.eye(grid.num_cells, dtype=bool)
    occupied = np.zeros((grid.num_cells, n_rbs), dtype=bool)
    placements = []
    for placed in range(n_ues):
        for _ in range(max_attempts):
            cell = int(rng.integers(grid.num_cells))
            rb = int(rng.integers(n_rbs))
            if not occupied[blocked_by[cell], rb].any():
                occupied[cell, rb] = True
                placements.append((cell + 1, rb))
                break
        else:
            raise InfeasibleOccupancyError(placed, n_ues, max_attempts)
    return placements


def generate_scenario(grid, n_rbs, n_ues, q, uav_altitude, rng,
                      constrain_occupancy=True, max_attempts=DEFAULT_PLACEMENT_ATTEMPTS):
    """
    Draw one snapshot.

    Each UE gets a uniformly random (cell, RB) pair by rejection sampling so
    that co-channel cells never fall inside each other's q-tier neighborhood.
    The UAV is dropped uniformly in cell 1 at a fixed altitude.
    """
    if n_rbs < 1:
        raise InvalidParameterError(f"Need at least one RB, got {n_rbs}")
    if n_ues < 0:
        raise InvalidParameterError(f"UE count must be non-negative, got {n_ues}")
    if uav_altitude < 0:
        raise InvalidParameterError(f"UAV altitude must be non-negative, got {uav_altitude}")

    placements = _place_ues(grid, n_rbs, n_ues, q, rng, constrain_occupancy, max_attempts)
    ues = tuple(
        TerrestrialUE(cell=cell, rb=rb, pos=sample_uniform_in_cell(grid, cell, rng))
        for cell, rb in placements
    )
    occupancy = [set() for _ in range(n_rbs)]
    for ue in ues:
        occupancy[ue.rb].add(ue.cell)

    ground = sample_uniform_in_cell(grid, 1, rng)
    uav_pos = Position3D(ground.x, ground.y, float(uav_altitude))

    return Scenario(
        grid=grid,
        n_rbs=n_rbs,
        ues=ues,
        occupancy=tuple(frozenset(cells) for cells in occupancy),
        uav_pos=uav_pos,
        serving_bs=associate(grid, uav_pos),
        q=q,
    )


def available_rbs(scenario, j):
    """Omega: RBs unused in every cell of N_j(q)"""
    scenario.grid.check_cell(j)
    neighbors = scenario.grid.neighbor_matrix(scenario.q)[j - 1]
    occupied = scenario.occupancy_matrix()
    blocked = occupied[neighbors].any(axis=0)
    return {int(n) for n in np.flatnonzero(~blocked)}

"""
Hexagonal cell layout, neighbor tiers, in-cell sampling and the
worst-case UAV-BS / UAV-UE distance ratio used by robust power control
"""
import math
from dataclasses import dataclass, field

import numpy as np

from src.errors import InvalidParameterError

SQRT3 = math.sqrt(3.0)
# Relative slack on tier-distance thresholds
NEIGHBOR_TOLERANCE = 1e-6

# Unit lattice directions of the hex grid, counterclockwise from +x
_LATTICE_DIRECTIONS = np.array(
    [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
)


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if self.z < 0:
            raise InvalidParameterError(f"Height must be non-negative, got z={self.z}")

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other):
        return math.sqrt(
            (self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2
        )

    def horizontal_distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class RhoBound:
    rho: float
    xi_m: float


@dataclass(frozen=True, eq=False)
class HexGrid:
    """
    Multi-tier hexagonal layout with one BS at the center of every cell.

    Cell ids start at 1 for the center cell and continue tier by tier,
    counterclockwise from the +x axis. ``cell_radius_m`` is the circumradius,
    so adjacent centers are sqrt(3) * R_c apart.
    """
    tiers: int
    cell_radius_m: float
    bs_height_m: float
    centers: np.ndarray = field(repr=False)

    @property
    def num_cells(self):
        return len(self.centers)

    @property
    def cell_ids(self):
        return range(1, self.num_cells + 1)

    @property
    def inter_site_distance_m(self):
        return SQRT3 * self.cell_radius_m

    def check_cell(self, j):
        if not 1 <= j <= self.num_cells:
            raise InvalidParameterError(f"Invalid cell id {j} (grid has {self.num_cells} cells)")

    def center(self, j):
        self.check_cell(j)
        x, y = self.centers[j - 1]
        return Position3D(float(x), float(y), 0.0)

    def bs_position(self, j):
        self.check_cell(j)
        x, y = self.centers[j - 1]
        return Position3D(float(x), float(y), self.bs_height_m)

    def bs_positions(self):
        """(J, 3) array of BS antenna positions"""
        heights = np.full((self.num_cells, 1), self.bs_height_m)
        return np.hstack([self.centers, heights])

    def neighbor_matrix(self, q):
        """Boolean (J, J) matrix, entry [i, j] true when cell j+1 is in N_{i+1}(q)"""
        if q < 0:
            raise InvalidParameterError(f"q must be non-negative, got {q}")
        diff = self.centers[:, None, :] - self.centers[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        limit = q * self.inter_site_distance_m + NEIGHBOR_TOLERANCE * self.cell_radius_m
        return dist <= limit

    def contains(self, j, x, y):
        """True when the horizontal point lies in the closed hexagon of cell j"""
        cx, cy = self.centers[j - 1]
        offset = np.array([x - cx, y - cy])
        # Edge normals point at the six neighbors
        projections = _LATTICE_DIRECTIONS @ offset
        inradius = SQRT3 / 2 * self.cell_radius_m
        return bool(np.all(projections <= inradius * (1 + 1e-12)))


def build_grid(tiers, cell_radius_m, bs_height_m):
    """Build a grid of 1 + 3 * tiers * (tiers + 1) cells centered at the origin"""
    if tiers < 0:
        raise InvalidParameterError(f"tiers must be non-negative, got {tiers}")
    if cell_radius_m <= 0:
        raise InvalidParameterError(f"Cell radius must be positive, got {cell_radius_m}")
    if bs_height_m < 0:
        raise InvalidParameterError(f"BS height must be non-negative, got {bs_height_m}")

    isd = SQRT3 * cell_radius_m
    centers = [(0.0, 0.0)]
    for t in range(1, tiers + 1):
        # Start at the corner on the +x axis and walk the ring counterclockwise
        for k in range(6):
            corner = t * _LATTICE_DIRECTIONS[k]
            step = _LATTICE_DIRECTIONS[(k + 2) % 6]
            for s in range(t):
                x, y = (corner + s * step) * isd
                centers.append((float(x), float(y)))

    return HexGrid(
        tiers=tiers,
        cell_radius_m=float(cell_radius_m),
        bs_height_m=float(bs_height_m),
        centers=np.array(centers),
    )


def neighbor_set(grid, j, q):
    """N_j(q): cells whose centers lie within q inter-site distances of cell j, j included"""
    grid.check_cell(j)
    row = grid.neighbor_matrix(q)[j - 1]
    return {int(i) + 1 for i in np.flatnonzero(row)}


def sample_uniform_in_cell(grid, j, rng):
    """Uniform point in the hexagon of cell j at ground level (z = 0)"""
    grid.check_cell(j)
    half_width = SQRT3 / 2 * grid.cell_radius_m
    cx, cy = grid.centers[j - 1]
    # Bounding-box rejection, acceptance rate 3/4
    while True:
        dx = rng.uniform(-half_width, half_width)
        dy = rng.uniform(-grid.cell_radius_m, grid.cell_radius_m)
        if grid.contains(j, cx + dx, cy + dy):
            return Position3D(float(cx + dx), float(cy + dy), 0.0)


def worst_case_ratio(H_u, H_B, R_c):
    """
    Lower bound rho on d_j / a_j(n) over every BS placement within R_c of the UE.

    xi is the horizontal UAV-UE distance minimizing the ratio when the UAV
    lies outside the UE's R_c circle; the BS then sits on the segment
    between them, R_c from the UE.
    """
    if R_c <= 0:
        raise InvalidParameterError(f"Cell radius must be positive, got {R_c}")
    if H_B < 0:
        raise InvalidParameterError(f"BS height must be non-negative, got {H_B}")
    if H_u <= H_B:
        raise InvalidParameterError(f"UAV altitude {H_u} m must exceed BS height {H_B} m")

    c = R_c ** 2 + H_B ** 2 - 2 * H_u * H_B
    xi = (c + math.sqrt(c ** 2 + 4 * R_c ** 2 * H_u ** 2)) / (2 * R_c)
    rho = math.sqrt(((xi - R_c) ** 2 + (H_u - H_B) ** 2) / (xi ** 2 + H_u ** 2))
    return RhoBound(rho=rho, xi_m=xi)

"""
Link-gain computation for the air-ground channels: LoS path loss, BS array
gain, Rician fading and the composite BS<->UAV and UE->UAV gain matrices
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.errors import InvalidParameterError


class ChannelMode(str, Enum):
    PURE_LOS = "pure-los"
    FADED = "faded"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(value):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(value, dtype=float))


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0


@dataclass(frozen=True)
class ChannelParams:
    beta0_db: float = -34.0
    alpha_los: float = 2.2
    carrier_hz: float = 2e9
    rician_k_db: float = 20.0
    noise_density_dbm_hz: float = -164.0
    rb_bandwidth_hz: float = 180e3
    antenna_elements: int = 8
    downtilt_deg: float = 10.0
    # Probabilistic LoS hook, all links LoS by default
    los_probability: float = 1.0
    alpha_nlos: float = 3.5
    beta0_nlos_db: float = -34.0

    def __post_init__(self):
        if self.alpha_los <= 0:
            raise InvalidParameterError(f"alpha_los must be positive, got {self.alpha_los}")
        if self.rb_bandwidth_hz <= 0:
            raise InvalidParameterError(f"RB bandwidth must be positive, got {self.rb_bandwidth_hz}")
        if self.antenna_elements < 1:
            raise InvalidParameterError(f"Need at least one antenna element, got {self.antenna_elements}")
        if self.carrier_hz <= 0:
            raise InvalidParameterError(f"Carrier frequency must be positive, got {self.carrier_hz}")
        if not 0.0 <= self.los_probability <= 1.0:
            raise InvalidParameterError(f"los_probability must be in [0, 1], got {self.los_probability}")
        if self.alpha_nlos <= 0:
            raise InvalidParameterError(f"alpha_nlos must be positive, got {self.alpha_nlos}")


@dataclass(frozen=True, eq=False)
class LinkGains:
    """
    Linear power gains indexed [cell_id - 1, rb].

    f: BS -> UAV, g: UAV -> BS, s: UE -> UAV (zero where no UE occupies the
    (cell, RB) pair).
    """
    f: np.ndarray
    g: np.ndarray
    s: np.ndarray


def noise_power(params):
    """Receiver noise power per RB in watts"""
    return float(dbm_to_watts(params.noise_density_dbm_hz) * params.rb_bandwidth_hz)


def los_pathloss_gain(d_m, params):
    """beta0 * d^-alpha_L; accepts scalars or arrays"""
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise InvalidParameterError("Distance must be positive")
    gain = db_to_linear(params.beta0_db) * d ** (-params.alpha_los)
    return float(gain) if gain.ndim == 0 else gain


def _nlos_pathloss_gain(d, params):
    return db_to_linear(params.beta0_nlos_db) * d ** (-params.alpha_nlos)


def array_gain(elevation_rad, elements, downtilt_deg):
    """
    Power gain of a vertical half-wavelength ULA steered to the downtilt.

    Elevation is measured from the horizon, positive below it. Normalized so
    the peak equals the element count.
    """
    theta = np.asarray(elevation_rad, dtype=float)
    offset = np.sin(theta) - math.sin(math.radians(downtilt_deg))
    m = np.arange(elements)
    factor = np.exp(1j * np.pi * np.multiply.outer(offset, m)).sum(axis=-1)
    gain = np.abs(factor) ** 2 / elements
    return float(gain) if gain.ndim == 0 else gain


def elevation_angle(bs_pos, target_pos):
    """Elevation of the target seen from the BS, positive below the horizon"""
    horizontal = bs_pos.horizontal_distance_to(target_pos)
    dz = bs_pos.z - target_pos.z
    if horizontal == 0 and dz == 0:
        raise InvalidParameterError("BS and target positions coincide")
    return math.atan2(dz, horizontal)


def antenna_gain(bs_pos, target_pos, params):
    theta = elevation_angle(bs_pos, target_pos)
    return array_gain(theta, params.antenna_elements, params.downtilt_deg)


def rician_fading_sample(k_db, rng, size=None):
    """Unit-mean Rician power factor |h|^2; k_db = inf gives 1, -inf gives Rayleigh"""
    if math.isinf(k_db) and k_db > 0:
        return 1.0 if size is None else np.ones(size)
    k = 0.0 if math.isinf(k_db) else float(db_to_linear(k_db))
    scatter = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)
    h = math.sqrt(k / (k + 1)) + math.sqrt(1 / (k + 1)) * scatter
    power = np.abs(h) ** 2
    return float(power) if size is None else power


def _path_gain(distances, params, rng):
    gain = los_pathloss_gain(distances, params)
    if params.los_probability < 1.0:
        nlos = rng.random(np.shape(distances)) >= params.los_probability
        gain = np.where(nlos, _nlos_pathloss_gain(np.asarray(distances), params), gain)
    return gain


def compute_link_gains(scenario, params, mode, rng):
    """
    Build F, G and the UE sensing gains for one snapshot.

    G equals F (shared path loss, same array for receive, same fading draw).
    In pure-LoS mode every fading factor is 1, so rows are flat across RBs.
    """
    mode = ChannelMode(mode)
    grid = scenario.grid
    uav = scenario.uav_pos
    J, N = grid.num_cells, scenario.n_rbs

    bs = grid.bs_positions()
    distances = np.sqrt(((bs - uav.as_array()) ** 2).sum(axis=1))
    horizontal = np.hypot(bs[:, 0] - uav.x, bs[:, 1] - uav.y)
    elevations = np.arctan2(bs[:, 2] - uav.z, horizontal)
    directivity = array_gain(elevations, params.antenna_elements, params.downtilt_deg)
    base = np.atleast_1d(_path_gain(distances, params, rng)) * np.atleast_1d(directivity)

    if mode is ChannelMode.FADED:
        fading = rician_fading_sample(params.rician_k_db, rng, size=(J, N))
    else:
        fading = np.ones((J, N))
    f = base[:, None] * fading
    g = f.copy()

    s = np.zeros((J, N))
    for ue in scenario.ues:
        a = uav.distance_to(ue.pos)
        gain = float(_path_gain(a, params, rng))
        if mode is ChannelMode.FADED:
            gain *= rician_fading_sample(params.rician_k_db, rng)
        s[ue.cell - 1, ue.rb] = gain

    for matrix in (f, g, s):
        matrix.setflags(write=False)
    return LinkGains(f=f, g=g, s=s)


def downlink_interference_w(scenario, gains, rb, power_w):
    """I_DL(n): every BS occupying the RB transmits at power_w toward its own UE"""
    total = 0.0
    for j in sorted(scenario.occupancy[rb]):
        total += power_w * gains.f[j - 1, rb]
    return total


def sensed_uplink_power_w(scenario, gains, rb, power_w):
    """E_UL(n): received power at the UAV from every UE transmitting in the RB"""
    total = 0.0
    for j in sorted(scenario.occupancy[rb]):
        total += power_w * gains.s[j - 1, rb]
    return total

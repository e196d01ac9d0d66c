"""
Experiment configuration: defaults, presets and config-file loading
"""
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from src.channel import ChannelMode, ChannelParams
from src.errors import InvalidParameterError
from src.geometry import build_grid

DOWNLINK_SCHEMES = ("dl_conventional", "dl_sensing", "dl_optimal")
UPLINK_SCHEMES = ("ul_conventional", "ul_sensing", "ul_sensing_csi", "ul_optimal")
ALL_SCHEMES = DOWNLINK_SCHEMES + UPLINK_SCHEMES


def _sweep(start, stop, step):
    return [float(v) for v in np.arange(start, stop + step / 2, step)]


@dataclass
class ExperimentConfig:
    # Channel
    beta0_db: float = -34.0
    alpha_los: float = 2.2
    carrier_hz: float = 2e9
    rician_k_db: float = 20.0
    noise_density_dbm_hz: float = -164.0
    rb_bandwidth_hz: float = 180e3
    antenna_elements: int = 8
    downtilt_deg: float = 10.0
    los_probability: float = 1.0
    alpha_nlos: float = 3.5
    beta0_nlos_db: float = -34.0
    # Network
    tiers: int = 3
    cell_radius_m: float = 800.0
    bs_height_m: float = 25.0
    uav_altitude_m: float = 200.0
    n_rbs: int = 30
    n_ues: int = 60
    q: int = 1
    terrestrial_icic: bool = True
    max_placement_attempts: int = 10_000
    max_snapshot_draws: int = 100
    # UAV requests and power
    n_d: int = 1
    n_u: int = 10
    p_dl_dbm: list = field(default_factory=lambda: _sweep(30.0, 46.0, 2.0))
    p_ul_dbm: float = 10.0
    gamma_u_dbm: list = field(default_factory=lambda: _sweep(-120.0, -70.0, 5.0))
    m_d: list = field(default_factory=lambda: [5, 10, 15])
    m_u: list = field(default_factory=lambda: [12, 20])
    sensing_noise_dbm: Optional[float] = None
    # Monte Carlo
    realizations: int = 1000
    master_seed: int = 2020
    mode: str = ChannelMode.FADED.value
    schemes: list = field(default_factory=lambda: list(ALL_SCHEMES))

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.realizations < 1:
            raise InvalidParameterError(f"realizations must be >= 1, got {self.realizations}")
        for name in ("p_dl_dbm", "gamma_u_dbm", "schemes"):
            if not getattr(self, name):
                raise InvalidParameterError(f"{name} must not be empty")
        try:
            ChannelMode(self.mode)
        except ValueError:
            raise InvalidParameterError(
                f"Unknown mode '{self.mode}', expected one of {[m.value for m in ChannelMode]}"
            ) from None
        unknown = [s for s in self.schemes if s not in ALL_SCHEMES]
        if unknown:
            raise InvalidParameterError(f"Unknown schemes {unknown}, expected a subset of {list(ALL_SCHEMES)}")
        if "dl_sensing" in self.schemes:
            if not self.m_d:
                raise InvalidParameterError("dl_sensing needs at least one m_d value")
            if any(m <= self.n_d for m in self.m_d):
                raise InvalidParameterError(f"Every m_d must exceed n_d={self.n_d}, got {self.m_d}")
        if any(s in self.schemes for s in ("ul_sensing", "ul_sensing_csi")):
            if not self.m_u:
                raise InvalidParameterError("ul_sensing needs at least one m_u value")
            if any(m <= self.n_u for m in self.m_u):
                raise InvalidParameterError(f"Every m_u must exceed n_u={self.n_u}, got {self.m_u}")
        if self.n_d < 1 or self.n_u < 1:
            raise InvalidParameterError("n_d and n_u must be at least 1")
        if self.n_rbs < 1:
            raise InvalidParameterError(f"n_rbs must be at least 1, got {self.n_rbs}")
        if self.n_ues < 0 or self.q < 0:
            raise InvalidParameterError(f"n_ues and q must be non-negative, got {self.n_ues} and {self.q}")
        # Grid fields are checked by build_grid itself
        build_grid(self.tiers, self.cell_radius_m, self.bs_height_m)
        if self.uav_altitude_m <= self.bs_height_m:
            raise InvalidParameterError("uav_altitude_m must exceed bs_height_m")
        if self.max_snapshot_draws < 1 or self.max_placement_attempts < 1:
            raise InvalidParameterError("Retry budgets must be at least 1")
        # Channel fields are checked by ChannelParams itself
        self.channel_params()

    def channel_params(self):
        return ChannelParams(**{f.name: getattr(self, f.name) for f in fields(ChannelParams)})

    @property
    def channel_mode(self):
        return ChannelMode(self.mode)

    def has_downlink(self):
        return any(s in DOWNLINK_SCHEMES for s in self.schemes)

    def has_uplink(self):
        return any(s in UPLINK_SCHEMES for s in self.schemes)

    def to_dict(self):
        return asdict(self)

    def replace(self, **overrides):
        return ExperimentConfig.from_dict({**self.to_dict(), **overrides})

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise InvalidParameterError(f"Unknown config keys: {unknown}")
        try:
            return cls(**values)
        except TypeError as e:
            raise InvalidParameterError(f"Bad config value: {e}") from e

    @classmethod
    def from_json_file(cls, path):
        return cls.from_dict(read_config_file(path))


def read_config_file(path):
    """Raw key-value pairs of a JSON config file, unknown keys rejected"""
    with open(path, "r") as f:
        try:
            values = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidParameterError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(values, dict):
        raise InvalidParameterError(f"{path} must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise InvalidParameterError(f"Unknown config keys in {path}: {unknown}")
    return values


PRESETS = {
    # Downlink rate versus BS peak power
    "fig3a": {
        "schemes": ["dl_conventional", "dl_sensing", "dl_optimal"],
        "m_d": [5, 10, 15],
    },
    # Worst-case uplink interference, robust versus perfect-CSI power control
    "fig3b": {
        "schemes": ["ul_sensing", "ul_sensing_csi"],
        "m_u": [12],
        "p_ul_dbm": 10.0,
    },
    # Uplink rate versus achieved interference
    "fig3c": {
        "schemes": ["ul_conventional", "ul_sensing", "ul_optimal"],
        "m_u": [12, 20],
        "p_ul_dbm": 10.0,
        "gamma_u_dbm": _sweep(-120.0, -50.0, 5.0),
    },
}

# Descriptive names for the same presets
PRESET_ALIASES = {
    "dl-rate": "fig3a",
    "ul-safety": "fig3b",
    "ul-tradeoff": "fig3c",
}
PRESET_NAMES = sorted(PRESETS) + sorted(PRESET_ALIASES)


def load_config(config_file=None, preset=None, **overrides):
    """Defaults, then preset, then config file, then non-None overrides"""
    values = {}
    if preset is not None:
        preset = PRESET_ALIASES.get(preset, preset)
        if preset not in PRESETS:
            raise InvalidParameterError(f"Unknown preset '{preset}', expected one of {PRESET_NAMES}")
        values.update(PRESETS[preset])
    if config_file is not None:
        values.update(read_config_file(config_file))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(values)

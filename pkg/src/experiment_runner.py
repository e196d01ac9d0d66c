"""
Monte Carlo experiment runner: seeded realizations, paired scheme
comparison on a shared snapshot, and aggregation per sweep point
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache, partial

import numpy as np
import pandas as pd
from tqdm import tqdm

from src import allocation as alloc
from src.allocation import PowerControl
from src.channel import compute_link_gains, dbm_to_watts, noise_power, watts_to_dbm
from src.errors import IcicError, InsufficientRBsError, RealizationError
from src.geometry import build_grid, worst_case_ratio
from src.metrics import downlink_rate, uplink_rate
from src.scenario import available_rbs, generate_scenario

logger = logging.getLogger(__name__)

# Substream ids; ul_sensing_csi shares ul_sensing's stream so both see the same candidates
SCHEME_STREAMS = {
    "dl_conventional": 1,
    "dl_sensing": 2,
    "dl_optimal": 3,
    "ul_conventional": 4,
    "ul_sensing": 5,
    "ul_sensing_csi": 5,
    "ul_optimal": 6,
}
SNAPSHOT_STREAM = 0
FADING_STREAM = 1
SCHEME_STREAM = 2


@dataclass(frozen=True)
class SchemeVariant:
    label: str
    scheme: str
    downlink: bool
    m: int = 0

    @property
    def sweep_name(self):
        return "p_dl_dbm" if self.downlink else "gamma_u_dbm"


@dataclass(frozen=True)
class RealizationResult:
    index: int
    # (label, sweep value) -> RunMetrics
    metrics: dict


@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    sweep_name: str
    sweep_value: float
    mean_rate_bps_hz: float
    mean_iul_dbm: float
    max_iul_dbm: float
    n_realizations: int
    stderr: float


def expand_schemes(config):
    """One variant per scheme and candidate count, in config order"""
    variants = []
    for scheme in config.schemes:
        downlink = scheme.startswith("dl_")
        if scheme == "dl_sensing":
            variants += [SchemeVariant(f"{scheme}_m{m}", scheme, True, m) for m in config.m_d]
        elif scheme in ("ul_sensing", "ul_sensing_csi"):
            variants += [SchemeVariant(f"{scheme}_m{m}", scheme, False, m) for m in config.m_u]
        else:
            variants.append(SchemeVariant(scheme, scheme, downlink))
    return variants


def substream(master_seed, *key):
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


@lru_cache(maxsize=8)
def _grid(tiers, cell_radius_m, bs_height_m):
    return build_grid(tiers, cell_radius_m, bs_height_m)


def _required_rbs(config):
    needed = []
    if config.has_downlink():
        needed.append(config.n_d)
    if config.has_uplink():
        needed.append(config.n_u)
    return max(needed)


def draw_snapshot(config, index):
    """Scenario and link gains of one realization, redrawn while too few RBs are free"""
    grid = _grid(config.tiers, config.cell_radius_m, config.bs_height_m)
    rng = substream(config.master_seed, index, SNAPSHOT_STREAM)
    required = _required_rbs(config)

    for draw in range(config.max_snapshot_draws):
        scenario = generate_scenario(
            grid, config.n_rbs, config.n_ues, config.q, config.uav_altitude_m, rng,
            constrain_occupancy=config.terrestrial_icic,
            max_attempts=config.max_placement_attempts,
        )
        free = len(available_rbs(scenario, scenario.serving_bs))
        if free >= required:
            break
        logger.warning("Realization %d: only %d RBs free at BS %d, redrawing snapshot (%d/%d)",
                       index, free, scenario.serving_bs, draw + 1, config.max_snapshot_draws)
    else:
        raise InsufficientRBsError(free, required)

    scenario = replace(scenario, seed=config.master_seed, index=index)
    gains = compute_link_gains(
        scenario, config.channel_params(), config.channel_mode,
        substream(config.master_seed, index, FADING_STREAM),
    )
    return scenario, gains


def _evaluate(config, variant, scenario, gains, value, context):
    sigma2, rho_bound, noise_w = context
    params = config.channel_params()
    rng = substream(config.master_seed, scenario.index, SCHEME_STREAM,
                    SCHEME_STREAMS[variant.scheme], variant.m)

    if variant.downlink:
        p_dl = float(dbm_to_watts(value))
        if variant.scheme == "dl_conventional":
            allocation = alloc.conventional_downlink(scenario, config.n_d, p_dl, rng)
        elif variant.scheme == "dl_sensing":
            allocation = alloc.sensing_downlink(scenario, gains, variant.m, config.n_d, p_dl, rng,
                                                noise_w=noise_w)
        else:
            allocation = alloc.optimal_downlink(scenario, gains, config.n_d, p_dl, sigma2)
        return downlink_rate(allocation, gains, sigma2, scenario, p_dl, params.rb_bandwidth_hz)

    p_ul = float(dbm_to_watts(config.p_ul_dbm))
    gamma_u = float(dbm_to_watts(value))
    if variant.scheme == "ul_conventional":
        allocation = alloc.conventional_uplink(scenario, config.n_u, p_ul, rng)
    elif variant.scheme in ("ul_sensing", "ul_sensing_csi"):
        control = PowerControl.ROBUST if variant.scheme == "ul_sensing" else PowerControl.PERFECT_CSI
        allocation = alloc.sensing_uplink(
            scenario, gains, variant.m, config.n_u, p_ul, gamma_u, rho_bound, params.alpha_los, rng,
            power_control=control, noise_w=noise_w,
        )
    else:
        allocation = alloc.optimal_uplink(scenario, gains, config.n_u, p_ul, gamma_u)
    return uplink_rate(allocation, gains, sigma2, scenario, params.rb_bandwidth_hz)


def run_realization(config, index):
    """
    Every enabled scheme on one shared snapshot, at every sweep point.

    Scheme-internal draws come from a per-scheme substream that is recreated
    for each sweep point, so candidates stay fixed along the sweep and adding
    a scheme never shifts another scheme's draws.
    """
    try:
        scenario, gains = draw_snapshot(config, index)
        params = config.channel_params()
        noise_w = None
        if config.sensing_noise_dbm is not None:
            noise_w = float(dbm_to_watts(config.sensing_noise_dbm))
        context = (
            noise_power(params),
            worst_case_ratio(config.uav_altitude_m, config.bs_height_m, config.cell_radius_m),
            noise_w,
        )
        metrics = {}
        for variant in expand_schemes(config):
            sweep = config.p_dl_dbm if variant.downlink else config.gamma_u_dbm
            for value in sweep:
                metrics[(variant.label, float(value))] = _evaluate(
                    config, variant, scenario, gains, value, context)
    except IcicError as e:
        raise RealizationError(index, e) from e
    return RealizationResult(index=index, metrics=metrics)


class ExperimentRunner:
    def __init__(self, config, workers=1, progress=False):
        self.config = config
        self.workers = max(1, int(workers))
        self.progress = progress
        self.records = None

    def run_realizations(self):
        """Realization results in index order, whatever the worker count"""
        indices = range(self.config.realizations)
        task = partial(run_realization, self.config)
        bar = dict(total=len(indices), desc="realizations", disable=not self.progress)
        if self.workers == 1:
            return [task(i) for i in tqdm(indices, **bar)]

        chunksize = max(1, len(indices) // (self.workers * 8))
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(tqdm(executor.map(task, indices, chunksize=chunksize), **bar))

    def collect_records(self, results):
        """Long table with one row per (realization, scheme, sweep point)"""
        variants = expand_schemes(self.config)
        rows = []
        for result in results:
            for variant in variants:
                sweep = self.config.p_dl_dbm if variant.downlink else self.config.gamma_u_dbm
                for value in sweep:
                    m = result.metrics[(variant.label, float(value))]
                    rows.append({
                        "realization": result.index,
                        "scheme": variant.label,
                        "direction": "downlink" if variant.downlink else "uplink",
                        "sweep_name": variant.sweep_name,
                        "sweep_value": float(value),
                        "rate_bps_hz": m.rate_bps_hz,
                        "i_ul_w": m.i_ul_w if not variant.downlink else np.nan,
                        "n_rbs_assigned": len(m.per_rb),
                    })
        return pd.DataFrame(rows)

    @staticmethod
    def aggregate(records):
        rows = []
        grouped = records.groupby(["scheme", "sweep_name", "sweep_value"], sort=False)
        for (scheme, sweep_name, sweep_value), group in grouped:
            rates = group["rate_bps_hz"].to_numpy()
            n = len(rates)
            stderr = float(np.std(rates, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            uplink = sweep_name == "gamma_u_dbm"
            interference = group["i_ul_w"].to_numpy()
            # No co-channel hit in any realization: I_UL in dBm is not reported
            reported = uplink and np.max(interference) > 0
            rows.append(AggregateRow(
                scheme=scheme,
                sweep_name=sweep_name,
                sweep_value=float(sweep_value),
                mean_rate_bps_hz=float(np.mean(rates)),
                mean_iul_dbm=float(watts_to_dbm(np.mean(interference))) if reported else np.nan,
                max_iul_dbm=float(watts_to_dbm(np.max(interference))) if reported else np.nan,
                n_realizations=n,
                stderr=stderr,
            ))
        return rows

    def run(self):
        results = self.run_realizations()
        self.records = self.collect_records(results)
        return self.aggregate(self.records)


def run_experiment(config, workers=1, progress=False):
    return ExperimentRunner(config, workers=workers, progress=progress).run()

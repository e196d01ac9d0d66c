"""
RB allocation and power control schemes for the UAV downlink and uplink:
conventional q-tier ICIC, UAV-sensing-assisted selection with robust power
control, and perfect-CSI optimal allocation
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

from src.channel import downlink_interference_w, sensed_uplink_power_w
from src.errors import InsufficientRBsError, InvalidParameterError
from src.scenario import available_rbs

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


class Scheme(str, Enum):
    CONVENTIONAL = "conventional"
    SENSING = "sensing"
    # Sensing-based RB selection with perfect-CSI power control
    SENSING_CSI = "sensing_csi"
    OPTIMAL = "optimal"


class PowerControl(str, Enum):
    ROBUST = "robust"
    PERFECT_CSI = "perfect_csi"


@dataclass(frozen=True)
class SensingReport:
    candidate_rbs: tuple
    measured_w: dict = field(repr=False)


@dataclass(frozen=True)
class Allocation:
    direction: Direction
    rbs: tuple
    power_w: dict
    scheme: Scheme
    serving_bs: int
    report: SensingReport = field(default=None, repr=False)


def _omega(scenario, requested):
    omega = sorted(available_rbs(scenario, scenario.serving_bs))
    if len(omega) < requested:
        raise InsufficientRBsError(len(omega), requested)
    return omega


def _draw_subset(pool, size, rng):
    """Uniform subset without replacement, returned in RB order"""
    picks = rng.choice(len(pool), size=size, replace=False)
    return tuple(sorted(pool[int(i)] for i in picks))


def _candidate_count(m, n, omega, label):
    if m <= n:
        raise InvalidParameterError(f"{label}: candidate count {m} must exceed requested RBs {n}")
    if m > len(omega):
        logger.warning("%s: clamping %d candidates to %d available RBs", label, m, len(omega))
        return len(omega)
    return m


def _add_sensing_noise(measured, noise_w, rng):
    if not noise_w:
        return measured
    return {rb: value + float(rng.exponential(noise_w)) for rb, value in measured.items()}


def select_lowest(report, count):
    """The count candidates with the lowest measured power, ties to the lowest RB"""
    ranked = sorted(report.candidate_rbs, key=lambda rb: (report.measured_w[rb], rb))
    return tuple(sorted(ranked[:count]))


def measure_downlink_interference(scenario, gains, rbs, p_dl, noise_w=None, rng=None):
    """UAV-side measurement of I_DL(n), occupied BSs transmitting at p_dl"""
    candidates = tuple(sorted(rbs))
    measured = {rb: downlink_interference_w(scenario, gains, rb, p_dl) for rb in candidates}
    return SensingReport(candidates, _add_sensing_noise(measured, noise_w, rng))


def measure_uplink_activity(scenario, gains, rbs, p_ul, noise_w=None, rng=None):
    """UAV-side measurement of E_UL(n), every active UE transmitting at p_ul"""
    candidates = tuple(sorted(rbs))
    measured = {rb: sensed_uplink_power_w(scenario, gains, rb, p_ul) for rb in candidates}
    return SensingReport(candidates, _add_sensing_noise(measured, noise_w, rng))


def robust_uplink_power(e_ul, p_ul, gamma_u, rho_bound, alpha_los):
    """min{1, Gamma_u * rho^alpha / E_UL} * P_UL; an idle RB gets the peak power"""
    if e_ul <= 0:
        return p_ul
    return min(1.0, gamma_u * rho_bound.rho ** alpha_los / e_ul) * p_ul


def perfect_csi_uplink_power(scenario, gains, rb, p_ul, gamma_u):
    """min{min_j Gamma_u / G_j(n), P_UL} over the co-channel BSs of the RB"""
    power = p_ul
    for j in sorted(scenario.occupancy[rb]):
        gain = gains.g[j - 1, rb]
        if gain > 0:
            power = min(power, gamma_u / gain)
    return power


def conventional_downlink(scenario, n_d, p_dl, rng):
    omega = _omega(scenario, n_d)
    rbs = _draw_subset(omega, n_d, rng)
    power = {rb: p_dl for rb in rbs}
    return Allocation(Direction.DOWNLINK, rbs, power, Scheme.CONVENTIONAL, scenario.serving_bs)


def conventional_uplink(scenario, n_u, p_ul, rng):
    omega = _omega(scenario, n_u)
    rbs = _draw_subset(omega, n_u, rng)
    power = {rb: p_ul for rb in rbs}
    return Allocation(Direction.UPLINK, rbs, power, Scheme.CONVENTIONAL, scenario.serving_bs)


def sensing_downlink(scenario, gains, m_d, n_d, p_dl, rng, candidates=None, noise_w=None):
    """
    The serving BS hands M_d random available RBs to the UAV, which keeps
    the N_d with the lowest sensed interference.
    """
    omega = _omega(scenario, n_d)
    if candidates is None:
        m_d = _candidate_count(m_d, n_d, omega, "downlink sensing")
        candidates = _draw_subset(omega, m_d, rng)
    elif not set(candidates) <= set(omega) or len(candidates) < n_d:
        raise InvalidParameterError("Candidate RBs must be available and at least N_d")

    report = measure_downlink_interference(scenario, gains, candidates, p_dl, noise_w, rng)
    rbs = select_lowest(report, n_d)
    power = {rb: p_dl for rb in rbs}
    return Allocation(Direction.DOWNLINK, rbs, power, Scheme.SENSING, scenario.serving_bs, report)


def sensing_uplink(scenario, gains, m_u, n_u, p_ul, gamma_u, rho_bound, alpha_los, rng,
                   candidates=None, power_control=PowerControl.ROBUST, noise_w=None):
    """
    The UAV senses terrestrial uplink activity on M_u candidates, keeps the
    N_u quietest RBs and caps its power on each with the worst-case gain
    bound rho^-alpha * E_UL(n) / P_UL (or with the true gains under
    perfect-CSI power control).
    """
    omega = _omega(scenario, n_u)
    if candidates is None:
        m_u = _candidate_count(m_u, n_u, omega, "uplink sensing")
        candidates = _draw_subset(omega, m_u, rng)
    elif not set(candidates) <= set(omega) or len(candidates) < n_u:
        raise InvalidParameterError("Candidate RBs must be available and at least N_u")

    report = measure_uplink_activity(scenario, gains, candidates, p_ul, noise_w, rng)
    rbs = select_lowest(report, n_u)

    if PowerControl(power_control) is PowerControl.ROBUST:
        power = {
            rb: robust_uplink_power(report.measured_w[rb], p_ul, gamma_u, rho_bound, alpha_los)
            for rb in rbs
        }
        scheme = Scheme.SENSING
    else:
        power = {rb: perfect_csi_uplink_power(scenario, gains, rb, p_ul, gamma_u) for rb in rbs}
        scheme = Scheme.SENSING_CSI
    return Allocation(Direction.UPLINK, rbs, power, scheme, scenario.serving_bs, report)


def optimal_downlink(scenario, gains, n_d, p_dl, sigma2):
    """The N_d available RBs with the largest F_ju(n) / (sigma^2 + I_DL(n))"""
    omega = _omega(scenario, n_d)
    report = measure_downlink_interference(scenario, gains, omega, p_dl)
    j_u = scenario.serving_bs
    quality = {rb: gains.f[j_u - 1, rb] / (sigma2 + report.measured_w[rb]) for rb in omega}
    ranked = sorted(omega, key=lambda rb: (-quality[rb], rb))
    rbs = tuple(sorted(ranked[:n_d]))
    return Allocation(Direction.DOWNLINK, rbs, {rb: p_dl for rb in rbs}, Scheme.OPTIMAL, j_u, report)


def optimal_uplink(scenario, gains, n_u, p_ul, gamma_u):
    """Perfect-CSI power on every available RB, then the N_u largest p*(n) * G_ju(n)"""
    omega = _omega(scenario, n_u)
    j_u = scenario.serving_bs
    power = {rb: perfect_csi_uplink_power(scenario, gains, rb, p_ul, gamma_u) for rb in omega}
    received = {rb: power[rb] * gains.g[j_u - 1, rb] for rb in omega}
    ranked = sorted(omega, key=lambda rb: (-received[rb], rb))
    rbs = tuple(sorted(ranked[:n_u]))
    return Allocation(Direction.UPLINK, rbs, {rb: power[rb] for rb in rbs}, Scheme.OPTIMAL, j_u)

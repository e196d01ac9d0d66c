"""
UAV achievable rates and worst-case uplink interference for an allocation
"""
import math
from dataclasses import dataclass
from typing import Optional

from src.allocation import Direction
from src.channel import downlink_interference_w
from src.errors import InvalidParameterError


@dataclass(frozen=True)
class RBMetric:
    rb: int
    rate_bps_hz: float
    # I_DL(n) for downlink, max_j p_u(n) G_j(n) for uplink
    interference_w: float


@dataclass(frozen=True)
class RunMetrics:
    direction: Direction
    r_dl_bps_hz: float = 0.0
    r_ul_bps_hz: float = 0.0
    i_ul_w: float = 0.0
    per_rb: tuple = ()
    rb_bandwidth_hz: Optional[float] = None

    @property
    def rate_bps_hz(self):
        return self.r_dl_bps_hz if self.direction is Direction.DOWNLINK else self.r_ul_bps_hz

    @property
    def rate_bps(self):
        if self.rb_bandwidth_hz is None:
            return None
        return self.rate_bps_hz * self.rb_bandwidth_hz


def _expect(alloc, direction):
    if alloc.direction is not direction:
        raise InvalidParameterError(f"Expected a {direction.value} allocation, got {alloc.direction.value}")


def downlink_rate(alloc, gains, sigma2, scenario, interferer_power_w, rb_bandwidth_hz=None):
    """R_DL(n) = log2(1 + P F_ju / (sigma^2 + I_DL)) summed over the assigned RBs"""
    _expect(alloc, Direction.DOWNLINK)
    j_u = alloc.serving_bs
    per_rb = []
    for rb in alloc.rbs:
        interference = downlink_interference_w(scenario, gains, rb, interferer_power_w)
        sinr = alloc.power_w[rb] * gains.f[j_u - 1, rb] / (sigma2 + interference)
        per_rb.append(RBMetric(rb, math.log2(1.0 + sinr), interference))
    return RunMetrics(
        direction=Direction.DOWNLINK,
        r_dl_bps_hz=math.fsum(m.rate_bps_hz for m in per_rb),
        per_rb=tuple(per_rb),
        rb_bandwidth_hz=rb_bandwidth_hz,
    )


def rb_worst_interference(alloc, gains, scenario, rb):
    """max over co-channel BSs of p_u(n) G_j(n); 0 on an idle RB"""
    worst = 0.0
    for j in sorted(scenario.occupancy[rb]):
        worst = max(worst, alloc.power_w[rb] * gains.g[j - 1, rb])
    return worst


def uplink_worst_interference(alloc, gains, scenario):
    """I_UL: maximum UAV interference to any co-channel BS over the assigned RBs"""
    _expect(alloc, Direction.UPLINK)
    return max((rb_worst_interference(alloc, gains, scenario, rb) for rb in alloc.rbs), default=0.0)


def uplink_rate(alloc, gains, sigma2, scenario=None, rb_bandwidth_hz=None):
    """
    R_UL(n) = log2(1 + p_u G_ju / sigma^2) summed over the assigned RBs.

    Terrestrial interference at the serving BS is below the noise floor under
    q-tier ICIC and is left out. With a scenario, I_UL is filled in as well.
    """
    _expect(alloc, Direction.UPLINK)
    j_u = alloc.serving_bs
    per_rb = []
    for rb in alloc.rbs:
        snr = alloc.power_w[rb] * gains.g[j_u - 1, rb] / sigma2
        worst = rb_worst_interference(alloc, gains, scenario, rb) if scenario is not None else 0.0
        per_rb.append(RBMetric(rb, math.log2(1.0 + snr), worst))
    return RunMetrics(
        direction=Direction.UPLINK,
        r_ul_bps_hz=math.fsum(m.rate_bps_hz for m in per_rb),
        i_ul_w=max((m.interference_w for m in per_rb), default=0.0),
        per_rb=tuple(per_rb),
        rb_bandwidth_hz=rb_bandwidth_hz,
    )

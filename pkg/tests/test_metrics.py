import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.allocation import Allocation, Direction, Scheme, sensing_downlink
from src.channel import ChannelParams, compute_link_gains, noise_power
from src.errors import InvalidParameterError
from src.metrics import downlink_rate, uplink_rate, uplink_worst_interference
from src.scenario import available_rbs, generate_scenario


def _allocation(direction, power_w, serving_bs=1):
    return Allocation(direction, tuple(sorted(power_w)), dict(power_w), Scheme.CONVENTIONAL, serving_bs)


@pytest.mark.parametrize("power, rate", [(1.0, 1.0), (3.0, 2.0), (0.0, 0.0)])
def test_downlink_spot_values(grid, scenario_factory, gains_factory, power, rate):
    scenario = scenario_factory(grid, 2, [])
    gains = gains_factory(37, 2, f=1.0)
    metrics = downlink_rate(_allocation(Direction.DOWNLINK, {0: power}), gains, 1.0, scenario, 1.0)
    assert metrics.rate_bps_hz == rate
    assert metrics.r_ul_bps_hz == 0.0


def test_downlink_counts_interference(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 2, [(20, 0)])
    f = np.full((37, 2), 1.0)
    f[19, 0] = 0.5
    gains = gains_factory(37, 2, f=f)
    # Interferer at 4 W: I = 2, SINR = 3 / (1 + 2)
    metrics = downlink_rate(_allocation(Direction.DOWNLINK, {0: 3.0}), gains, 1.0, scenario, 4.0)
    assert metrics.rate_bps_hz == pytest.approx(np.log2(1 + 3.0 / 3.0))
    assert metrics.per_rb[0].interference_w == 2.0


def test_uplink_spot_values(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 3, [])
    gains = gains_factory(37, 3, f=1.0)
    metrics = uplink_rate(_allocation(Direction.UPLINK, {0: 1.0, 1: 3.0, 2: 0.0}), gains, 1.0, scenario)
    assert metrics.rate_bps_hz == 3.0
    assert [m.rate_bps_hz for m in metrics.per_rb] == [1.0, 2.0, 0.0]
    assert metrics.i_ul_w == 0.0


def test_absolute_rate(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 1, [])
    gains = gains_factory(37, 1, f=1.0)
    metrics = uplink_rate(_allocation(Direction.UPLINK, {0: 1.0}), gains, 1.0, scenario, rb_bandwidth_hz=180e3)
    assert metrics.rate_bps == 180e3
    assert uplink_rate(_allocation(Direction.UPLINK, {0: 1.0}), gains, 1.0).rate_bps is None


def test_worst_interference_single_pair(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 2, [(20, 0)])
    f = np.zeros((37, 2))
    f[19, 0] = 1e-9
    gains = gains_factory(37, 2, f=f)
    allocation = _allocation(Direction.UPLINK, {0: 0.01, 1: 0.01})
    assert_allclose(uplink_worst_interference(allocation, gains, scenario), 1e-11)
    assert_allclose(uplink_rate(allocation, gains, 1.0, scenario).i_ul_w, 1e-11)


def test_worst_interference_idle_rbs(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 2, [])
    allocation = _allocation(Direction.UPLINK, {0: 0.01, 1: 0.01})
    assert uplink_worst_interference(allocation, gains_factory(37, 2), scenario) == 0.0


def test_direction_mismatch(grid, scenario_factory, gains_factory):
    scenario = scenario_factory(grid, 1, [])
    gains = gains_factory(37, 1)
    with pytest.raises(InvalidParameterError):
        uplink_rate(_allocation(Direction.DOWNLINK, {0: 1.0}), gains, 1.0, scenario)
    with pytest.raises(InvalidParameterError):
        downlink_rate(_allocation(Direction.UPLINK, {0: 1.0}), gains, 1.0, scenario, 1.0)


def test_worst_interference_matches_double_loop(small_grid):
    rng = np.random.default_rng(21)
    params = ChannelParams()
    checked = 0
    while checked < 1000:
        scenario = generate_scenario(small_grid, 10, 20, 1, 200.0, rng)
        gains = compute_link_gains(scenario, params, "faded", rng)
        for _ in range(10):
            size = int(rng.integers(1, scenario.n_rbs + 1))
            rbs = rng.choice(scenario.n_rbs, size=size, replace=False).tolist()
            power = {rb: float(rng.uniform(0.0, 0.01)) for rb in rbs}
            allocation = _allocation(Direction.UPLINK, power, scenario.serving_bs)

            expected = 0.0
            for rb in allocation.rbs:
                for j in scenario.occupancy[rb]:
                    expected = max(expected, power[rb] * gains.g[j - 1, rb])
            assert uplink_worst_interference(allocation, gains, scenario) == expected
            checked += 1


def _random_snapshots(grid, count, seed):
    rng = np.random.default_rng(seed)
    params = ChannelParams()
    for _ in range(count):
        scenario = generate_scenario(grid, 10, 20, 1, 200.0, rng)
        yield scenario, compute_link_gains(scenario, params, "faded", rng), rng


def test_rates_grow_with_power(small_grid):
    sigma2 = noise_power(ChannelParams())
    for scenario, gains, rng in _random_snapshots(small_grid, 20, 22):
        rbs = rng.choice(scenario.n_rbs, size=5, replace=False).tolist()
        low = {rb: float(rng.uniform(0.0, 1.0)) for rb in rbs}
        high = {rb: p * float(rng.uniform(1.0, 10.0)) for rb, p in low.items()}
        for direction, rate in ((Direction.DOWNLINK, downlink_rate), (Direction.UPLINK, uplink_rate)):
            args = (gains, sigma2, scenario) + ((1.0,) if direction is Direction.DOWNLINK else ())
            weak = rate(_allocation(direction, low, scenario.serving_bs), *args)
            strong = rate(_allocation(direction, high, scenario.serving_bs), *args)
            for a, b in zip(weak.per_rb, strong.per_rb):
                assert b.rate_bps_hz >= a.rate_bps_hz
            assert strong.rate_bps_hz >= weak.rate_bps_hz


def test_worst_interference_below_peak_power_times_peak_gain(small_grid):
    for scenario, gains, rng in _random_snapshots(small_grid, 50, 23):
        rbs = rng.choice(scenario.n_rbs, size=6, replace=False).tolist()
        power = {rb: float(rng.uniform(0.0, 0.01)) for rb in rbs}
        allocation = _allocation(Direction.UPLINK, power, scenario.serving_bs)
        cross = [gains.g[j - 1, rb] for rb in rbs for j in scenario.occupancy[rb]]
        bound = max(power.values()) * max(cross, default=0.0)
        assert uplink_worst_interference(allocation, gains, scenario) <= bound


def test_rate_interference_matches_sensing_report(small_grid):
    sigma2 = noise_power(ChannelParams())
    for scenario, gains, rng in _random_snapshots(small_grid, 20, 24):
        omega = sorted(available_rbs(scenario, scenario.serving_bs))
        if len(omega) < 2:
            continue
        sensed = sensing_downlink(scenario, gains, len(omega), 1, 10.0, rng)
        metrics = downlink_rate(sensed, gains, sigma2, scenario, 10.0)
        for m in metrics.per_rb:
            assert m.interference_w == sensed.report.measured_w[m.rb]

import math

import numpy as np
import pytest

import _oracle as orc
from rfiqkd.channel import (
    BASIS_LABELS,
    ChannelParams,
    bob_measurement_bloch,
    n_photon_click_probs,
    outcome_probability,
    poisson_click_probs,
    single_photon_pair_stats,
    single_photon_yields,
    transmittance,
    wcs_statistics,
)
from rfiqkd.source import STATE_LABELS, SourceSpec, build_flawed_states

IDEAL = build_flawed_states(SourceSpec())


def test_transmittance_values():
    assert transmittance(ChannelParams(0.0)) == pytest.approx(0.2, abs=0)
    assert transmittance(ChannelParams(50.0)) == pytest.approx(
        0.01782501876267491, rel=1e-14)
    assert transmittance(ChannelParams(100.0)) == pytest.approx(
        0.0015886564694485628, rel=1e-14)
    ts = [transmittance(ChannelParams(d)) for d in (0, 10, 50, 100, 200)]
    assert all(a > b for a, b in zip(ts, ts[1:]))


def test_params_validation():
    for kw in ({"distance_km": -1.0}, {"distance_km": math.nan},
               {"alpha_db_per_km": -0.1}, {"eta_det": 0.0}, {"eta_det": 1.5},
               {"p_dark": 1.0}, {"p_dark": -1e-9}, {"omega": math.inf}):
        with pytest.raises(ValueError):
            ChannelParams(**{"distance_km": 10.0, **kw})


def test_measurement_bloch_directions():
    assert bob_measurement_bloch("Z", 0, 0.3).as_tuple() == (1.0, 0.0, 0.0, 1.0)
    assert bob_measurement_bloch("Z", 1, 0.3).as_tuple() == (1.0, -0.0, -0.0, -1.0)
    x0 = bob_measurement_bloch("X", 0, 0.0)
    y0 = bob_measurement_bloch("Y", 0, 0.0)
    assert (x0.x, x0.y, x0.z) == (1.0, 0.0, 0.0)
    assert (y0.x, y0.y, y0.z) == (0.0, 1.0, 0.0)
    # a quarter-turn drift maps Bob's X onto Alice's Y and Y onto -X
    xq = bob_measurement_bloch("X", 0, math.pi / 2.0)
    yq = bob_measurement_bloch("Y", 0, math.pi / 2.0)
    assert (xq.x, xq.y) == pytest.approx((0.0, 1.0), abs=1e-15)
    assert (yq.x, yq.y) == pytest.approx((-1.0, 0.0), abs=1e-15)
    w = 0.3
    xg = bob_measurement_bloch("X", 0, w)
    assert (xg.x, xg.y) == pytest.approx((math.cos(w), math.sin(w)), abs=0)
    with pytest.raises(ValueError):
        bob_measurement_bloch("W", 0, 0.0)
    with pytest.raises(ValueError):
        bob_measurement_bloch("Z", 2, 0.0)


def test_born_probabilities():
    z0 = bob_measurement_bloch("Z", 0, 0.0)
    z1 = bob_measurement_bloch("Z", 1, 0.0)
    assert outcome_probability(IDEAL["0Z"].bloch, z0) == pytest.approx(1.0, abs=0)
    assert outcome_probability(IDEAL["0Z"].bloch, z1) == pytest.approx(0.0, abs=1e-16)
    x0 = bob_measurement_bloch("X", 0, 0.0)
    assert outcome_probability(IDEAL["0Z"].bloch, x0) == pytest.approx(0.5, abs=1e-15)
    assert outcome_probability(IDEAL["0X"].bloch, x0) == pytest.approx(1.0, abs=1e-15)
    # the two outcomes of one basis exhaust the pulse
    rng = np.random.default_rng(7)
    for _ in range(50):
        bl = IDEAL[STATE_LABELS[rng.integers(4)]].bloch
        basis = BASIS_LABELS[rng.integers(3)]
        w = rng.uniform(-1.0, 1.0)
        total = (outcome_probability(bl, bob_measurement_bloch(basis, 0, w))
                 + outcome_probability(bl, bob_measurement_bloch(basis, 1, w)))
        assert total == pytest.approx(1.0, abs=1e-14)


def test_single_photon_no_dark():
    t = transmittance(ChannelParams(50.0))
    y0, y1 = n_photon_click_probs(1.0, t, 0.0, 1)
    assert y0 == pytest.approx(t, rel=1e-13)
    assert y1 == pytest.approx(0.0, abs=1e-15)
    y0, y1 = n_photon_click_probs(0.5, t, 0.0, 1)
    assert y0 == pytest.approx(t / 2.0, rel=1e-13)
    assert y0 == y1


def test_vacuum_pulse_dark_only():
    pd = 1e-6
    expected = pd * (1.0 - pd) + 0.5 * pd * pd
    for y in n_photon_click_probs(0.3, 0.5, pd, 0):
        assert y == pytest.approx(expected, abs=0)
    assert expected == pytest.approx(9.999994999999998e-07, abs=1e-21)
    assert poisson_click_probs(0.3, 0.5, 0.0, 0.0) == (0.0, 0.0)


def test_click_prob_validation():
    with pytest.raises(ValueError):
        n_photon_click_probs(1.2, 0.5, 0.0, 1)
    with pytest.raises(ValueError):
        n_photon_click_probs(0.5, 0.5, 0.0, -1)
    with pytest.raises(ValueError):
        poisson_click_probs(-0.1, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        poisson_click_probs(0.5, 0.5, 0.0, -1.0)


def test_poisson_gain_value():
    y0, y1 = poisson_click_probs(0.5, 1.0, 0.0, 0.5)
    assert y0 == y1
    assert y0 + y1 == pytest.approx(0.3934693402873666, rel=1e-14)


def test_poisson_is_photon_number_mixture():
    mu = 0.7
    t = 0.11
    pd = 3e-5
    for p0 in (0.0, 0.2, 0.5, 0.93):
        mix0 = mix1 = 0.0
        for n in range(45):
            w = math.exp(-mu) * mu ** n / math.factorial(n)
            yn0, yn1 = n_photon_click_probs(p0, t, pd, n)
            mix0 += w * yn0
            mix1 += w * yn1
        y0, y1 = poisson_click_probs(p0, t, pd, mu)
        assert y0 == pytest.approx(mix0, abs=1e-13)
        assert y1 == pytest.approx(mix1, abs=1e-13)


def test_yields_match_embedded_model():
    rng = np.random.default_rng(101)
    for trial in range(100):
        deltas = rng.uniform(-0.1, 0.1, size=6)
        if trial % 2 == 0:
            spec = SourceSpec(*deltas, theta_mode="independent",
                              theta=rng.uniform(0.0, 0.05),
                              gamma=rng.uniform(0.0, 1e-2))
        else:
            spec = SourceSpec(*deltas, theta_mode="dependent",
                              theta_hat=rng.uniform(0.0, 1e-2),
                              gamma=rng.uniform(0.0, 1e-2))
        ch = ChannelParams(distance_km=rng.uniform(0.0, 120.0),
                           omega=rng.uniform(-0.6, 0.6),
                           p_dark=10.0 ** rng.uniform(-7.0, -4.0))
        table = single_photon_yields(build_flawed_states(spec), ch)
        for label in STATE_LABELS:
            for basis in BASIS_LABELS:
                for s in (0, 1):
                    truth = orc.true_yield(spec, ch, label, basis, s)
                    assert table[(label, basis, s)] == pytest.approx(
                        truth, abs=1e-12)


def test_wcs_table_shape_and_ranges():
    ch = ChannelParams(50.0)
    stats = wcs_statistics(IDEAL, ch,
                           {"signal": 0.5, "decoy": 0.05, "vacuum": 0.0})
    assert set(stats.intensities) == {"signal", "decoy", "vacuum"}
    assert len(stats.intensity_yields) == 4 * 3 * 2 * 3
    assert len(stats.gains) == 9 * 3
    for value in stats.intensity_yields.values():
        assert 0.0 <= value <= 1.0
    for key, gain in stats.gains.items():
        assert 0.0 <= stats.error_gains[key] <= gain <= 1.0
        assert 0.0 <= stats.error_rates[key] <= 1.0
    # vacuum pulses click only through dark counts, whatever the pair
    pd = ch.p_dark
    dark_gain = 1.0 - (1.0 - pd) ** 2
    for pair in ("ZZ", "XY", "YX"):
        assert stats.gains[(pair, "vacuum")] == pytest.approx(dark_gain, rel=1e-12)
    assert stats.error_rates[("ZZ", "vacuum")] == pytest.approx(0.5, rel=1e-9)


def test_wcs_validation():
    with pytest.raises(ValueError):
        wcs_statistics(IDEAL, ChannelParams(10.0), {"signal": -0.5})
    with pytest.raises(ValueError):
        wcs_statistics(IDEAL, ChannelParams(10.0), {"signal": math.nan})


def test_drift_error_pattern():
    # with ideal states and no dark counts the X/Y error rates depend only
    # on the drift angle while Z is unaffected
    for w in (0.0, math.pi / 8.0, 0.4):
        ch = ChannelParams(50.0, p_dark=0.0, omega=w)
        sp = single_photon_yields(IDEAL, ch)
        expected = {"ZZ": 0.0,
                    "XX": (1.0 - math.cos(w)) / 2.0,
                    "YY": (1.0 - math.cos(w)) / 2.0,
                    "XY": (1.0 + math.sin(w)) / 2.0,
                    "YX": (1.0 - math.sin(w)) / 2.0}
        t = transmittance(ch)
        for pair, e in expected.items():
            gain, err = single_photon_pair_stats(sp, pair[0], pair[1])
            assert gain == pytest.approx(t, rel=1e-12)
            assert err / gain == pytest.approx(e, abs=1e-12)


def test_zero_gain_error_rate():
    stats = wcs_statistics(IDEAL, ChannelParams(50.0, p_dark=0.0),
                           {"vacuum": 0.0})
    assert stats.gains[("ZZ", "vacuum")] == 0.0
    assert stats.error_rates[("ZZ", "vacuum")] == 0.0

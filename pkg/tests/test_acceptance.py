"""End-to-end acceptance gate.

Eight criteria, each printing one PASS/FAIL line with its runtime so a
full run can be audited from the test log alone.  Tolerances are pinned
here and nowhere else; loosening them is a contract change, not a fix.
"""

import math
import time

import numpy as np
import pytest

import _acceptance_log
import _oracle as orc
from rfiqkd.channel import ChannelParams, single_photon_yields
from rfiqkd.cli import format_row, main
from rfiqkd.qubit import Herm2, binary_entropy, bloch_of, eig2, state_from_angles
from rfiqkd.rate import ProtocolParams, evaluate_point, sweep_distance
from rfiqkd.security import (
    PAIR_LABELS,
    SecurityAbort,
    analyze,
    eve_information,
    transmission_rates,
    virtual_yield_interval,
)
from rfiqkd.source import (
    STATE_LABELS,
    SourceSpec,
    build_coefficients,
    trojan_amplitudes,
    virtual_coefficients,
)

# warm caches outside any timed region
build_coefficients(SourceSpec())


def _report(number: int, name: str, ok: bool, elapsed: float) -> None:
    print(_acceptance_log.record(number, name, ok, elapsed), flush=True)


def exact_intervals(coeffs, ch):
    table = single_photon_yields(coeffs.states, ch)
    return {(basis, s): {label: (table[(label, basis, s)],) * 2
                         for label in STATE_LABELS}
            for basis in ("X", "Y") for s in (0, 1)}


def test_1_qubit_limit_equivalence():
    start = time.perf_counter()
    ok = True

    # with no leak and no back-reflection every slack eigenvalue is zero
    spec = SourceSpec(delta_im1=0.08, delta_im2=-0.05, delta_bs1=0.06,
                      delta_bs2=-0.04, delta_pm1=0.35, delta_pm2=-0.25)
    coeffs = build_coefficients(spec)
    for label in STATE_LABELS:
        pc = coeffs.practical[label]
        ok &= pc.slack_min == 0.0 and pc.slack_max == 0.0
    for virt in coeffs.virtual.values():
        ok &= virt.slack_min == 0.0 and virt.slack_max == 0.0

    # the interval chain collapses onto the plain loss-tolerant solution:
    # solve the four-state system exactly and push the point through
    ch = ChannelParams(50.0)
    table = single_photon_yields(coeffs.states, ch)
    V = np.array([[coeffs.practical[label].robust_weight * c
                   for c in coeffs.states[label].bloch.as_tuple()]
                  for label in STATE_LABELS])
    summary = analyze(coeffs, exact_intervals(coeffs, ch), 0.0)
    for pair in PAIR_LABELS:
        alice_basis, bob_basis = pair
        bounds = {}
        for s in (0, 1):
            y = np.array([table[(label, bob_basis, s)]
                          for label in STATE_LABELS])
            q = np.linalg.solve(V, y)
            for j in (0, 1):
                virt = coeffs.virtual[(alice_basis, j)]
                bounds[(j, s)] = (0.25 * virt.prep_probability
                                  * virt.robust_weight
                                  * (np.array(virt.bloch.as_tuple()) @ q))
        num = bounds[(0, 1)] + bounds[(1, 0)]
        plain = num / (num + bounds[(0, 0)] + bounds[(1, 1)])
        ok &= abs(summary.phase_error_lower[pair] - plain) <= 1e-9
        ok &= abs(summary.phase_error_upper[pair] - plain) <= 1e-9

    # flawless source, noiseless detection: C = 2 and no leakage to Eve,
    # independently of the drift angle
    ideal = build_coefficients(SourceSpec())
    for omega in (0.0, math.pi / 8.0, 0.5, 1.0):
        ch = ChannelParams(0.0, eta_det=1.0, p_dark=0.0, omega=omega)
        summary = analyze(ideal, exact_intervals(ideal, ch), 0.0)
        ok &= abs(summary.c_lower - 2.0) <= 1e-6
        ok &= summary.i_eve_upper <= 1e-9

    elapsed = time.perf_counter() - start
    _report(1, "qubit-limit equivalence", ok and elapsed < 1.0, elapsed)
    assert ok
    assert elapsed < 1.0


def test_2_oracle_containment():
    start = time.perf_counter()
    rng = np.random.default_rng(8151)
    violations = 0
    for trial in range(1000):
        deltas = rng.uniform(-0.1, 0.1, size=6)
        if trial % 2 == 0:
            spec = SourceSpec(*deltas, theta=rng.uniform(0.0, 0.05),
                              gamma=rng.uniform(0.0, 1e-2))
        else:
            spec = SourceSpec(*deltas, theta_mode="dependent",
                              theta_hat=rng.uniform(0.0, 1e-2),
                              gamma=rng.uniform(0.0, 1e-2))
        ch = ChannelParams(distance_km=rng.uniform(0.0, 120.0),
                           omega=rng.uniform(-0.5, 0.5),
                           p_dark=10.0 ** rng.uniform(-7.0, -4.0))
        coeffs = build_coefficients(spec)
        intervals = exact_intervals(coeffs, ch)
        for basis in ("X", "Y"):
            for s in (0, 1):
                rates = transmission_rates(coeffs, intervals[(basis, s)])
                if not rates.contains(orc.true_transmission_rates(ch, basis, s)):
                    violations += 1
                for alice_basis in ("X", "Y"):
                    for j in (0, 1):
                        lo, hi = virtual_yield_interval(
                            coeffs.virtual[(alice_basis, j)], rates)
                        truth = orc.true_virtual_yield(spec, ch, j,
                                                       alice_basis, basis, s)
                        if not lo - 1e-12 <= truth <= hi + 1e-12:
                            violations += 1
    ok = violations == 0
    elapsed = time.perf_counter() - start
    _report(2, f"oracle containment ({violations} violations)",
            ok and elapsed < 120.0, elapsed)
    assert violations == 0
    assert elapsed < 120.0


def test_3_leak_thresholds():
    start = time.perf_counter()
    ch = ChannelParams(50.0)
    base = evaluate_point(SourceSpec(), ch, ProtocolParams()).rate
    with_theta = evaluate_point(SourceSpec(theta=1e-6), ch,
                                ProtocolParams()).rate
    with_gamma = evaluate_point(SourceSpec(gamma=1e-10), ch,
                                ProtocolParams()).rate
    theta_gap = abs(with_theta - base) / base
    gamma_gap = abs(with_gamma - base) / base
    ok = base > 0.0 and theta_gap <= 1e-2 and gamma_gap <= 1e-2
    elapsed = time.perf_counter() - start
    _report(3, f"leak thresholds (theta gap {theta_gap:.2e}, "
               f"gamma gap {gamma_gap:.2e})", ok and elapsed < 30.0, elapsed)
    assert ok
    assert elapsed < 30.0


def test_4_encoding_flaw_tolerance():
    start = time.perf_counter()
    distances = [float(d) for d in range(0, 205, 5)]
    base = ChannelParams(0.0)
    ideal = sweep_distance(SourceSpec(), base, ProtocolParams(), distances)
    worst_pm = SourceSpec(delta_pm1=math.pi / 4.0, delta_pm2=math.pi / 4.0)
    flawed = sweep_distance(worst_pm, base, ProtocolParams(), distances)

    positive_everywhere = all(q.rate > 0.0 for p, q in zip(ideal, flawed)
                              if p.rate > 0.0)
    end_ideal = max((p.distance_km for p in ideal if p.rate > 0.0), default=0.0)
    end_flawed = max((p.distance_km for p in flawed if p.rate > 0.0),
                     default=0.0)
    endpoint_kept = end_flawed >= 0.9 * end_ideal > 0.0

    monotone = True
    for d in (25.0, 50.0, 75.0):
        rates = []
        for flaw in (0.0, 0.05, 0.1):
            spec = SourceSpec(delta_im1=flaw, delta_im2=flaw,
                              delta_bs1=flaw, delta_bs2=flaw)
            rates.append(evaluate_point(spec, ChannelParams(d),
                                        ProtocolParams()).rate)
        monotone &= rates[0] >= rates[1] >= rates[2]

    ok = positive_everywhere and endpoint_kept and monotone
    elapsed = time.perf_counter() - start
    _report(4, f"encoding-flaw tolerance (endpoints {end_ideal:g}/"
               f"{end_flawed:g} km)", ok and elapsed < 120.0, elapsed)
    assert ok
    assert elapsed < 120.0


def test_5_rate_orderings():
    start = time.perf_counter()
    distances = [float(d) for d in range(0, 155, 10)]
    base = ChannelParams(0.0)

    def curve(spec, protocol=ProtocolParams(), mode="asymptotic",
              optimize=True):
        return [p.rate for p in sweep_distance(spec, base, protocol,
                                               distances, mode=mode,
                                               optimize_mu=optimize)]

    def dominates(upper, lower):
        return all(a >= b - 1e-15 for a, b in zip(upper, lower))

    gamma_curves = [curve(SourceSpec(gamma=g)) for g in (0.0, 1e-6, 1e-3)]
    ok_gamma = all(dominates(a, b)
                   for a, b in zip(gamma_curves, gamma_curves[1:]))
    theta_curves = [curve(SourceSpec(theta_mode="dependent", theta_hat=t))
                    for t in (0.0, 1e-4, 1e-3)]
    ok_theta = all(dominates(a, b)
                   for a, b in zip(theta_curves, theta_curves[1:]))

    finite_curves = [curve(SourceSpec(),
                           ProtocolParams(mu=0.5, n_pulses=n),
                           mode="finite", optimize=False)
                     for n in (1e9, 1e10, 1e11)]
    finite_curves.append(curve(SourceSpec(), ProtocolParams(mu=0.5),
                               optimize=False))
    ok_finite = all(dominates(b, a)
                    for a, b in zip(finite_curves, finite_curves[1:]))
    ok_finite &= max(finite_curves[2]) > 0.0

    ok = ok_gamma and ok_theta and ok_finite
    elapsed = time.perf_counter() - start
    _report(5, "rate orderings", ok and elapsed < 300.0, elapsed)
    assert ok_gamma
    assert ok_theta
    assert ok_finite
    assert elapsed < 300.0


def test_6_abort_semantics():
    start = time.perf_counter()
    ok = True

    with pytest.raises(SecurityAbort):
        eve_information(2.0, 0.16)
    coeffs = build_coefficients(SourceSpec())
    ch = ChannelParams(0.0, eta_det=1.0, p_dark=0.0)
    with pytest.raises(SecurityAbort):
        analyze(coeffs, exact_intervals(coeffs, ch), 0.16)

    # a channel whose bit error crosses the limit yields a zero-rate
    # abort row rather than an exception
    point = evaluate_point(SourceSpec(), ChannelParams(150.0, p_dark=0.05),
                           ProtocolParams())
    ok &= point.abort and point.rate == 0.0
    ok &= point.summary is not None and point.summary.i_eve_upper == 1.0
    ok &= format_row("noisy", point).endswith(",1")

    elapsed = time.perf_counter() - start
    _report(6, "abort semantics", ok, elapsed)
    assert ok


def test_7_numerical_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(97)
    ok = True

    for _ in range(2000):
        a, d = rng.normal(size=2)
        re, im = rng.normal(size=2)
        lo, hi = eig2(Herm2(a11=a, a22=d, a12_re=re, a12_im=im))
        det = a * d - (re * re + im * im)
        ok &= abs((lo + hi) - (a + d)) <= 1e-10
        ok &= abs(lo * hi - det) <= 1e-10

    for x in rng.uniform(0.0, 1.0, size=2000):
        ok &= abs(binary_entropy(x) - binary_entropy(1.0 - x)) <= 1e-10
    ok &= binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    ok &= abs(binary_entropy(0.5) - 1.0) <= 1e-15

    for _ in range(2000):
        bl = bloch_of(state_from_angles(rng.uniform(0.0, math.pi),
                                        rng.uniform(0.0, 2.0 * math.pi)))
        ok &= abs(bl.x ** 2 + bl.y ** 2 + bl.z ** 2 - 1.0) <= 1e-10

    for _ in range(300):
        spec = SourceSpec(*rng.uniform(-0.1, 0.1, size=6),
                          theta=rng.uniform(0.0, 0.05),
                          gamma=rng.uniform(0.0, 1e-2))
        trojan = trojan_amplitudes(spec.gamma)
        for alice_basis in ("X", "Y"):
            for j in (0, 1):
                virt = virtual_coefficients(spec, trojan, alice_basis, j)
                f, h, prep, bloch = orc.gram_virtual_coefficients(
                    spec, j, alice_basis)
                ok &= abs(virt.robust_weight - f) <= 1e-10
                ok &= abs(virt.leaked_weight - h) <= 1e-10
                ok &= abs(virt.prep_probability - prep) <= 1e-10
                ok &= max(abs(np.array(virt.bloch.as_tuple()) - bloch)) <= 1e-10

    elapsed = time.perf_counter() - start
    _report(7, "numerical identities", ok and elapsed < 10.0, elapsed)
    assert ok
    assert elapsed < 10.0


def test_8_deterministic_output(tmp_path):
    start = time.perf_counter()
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    assert main(["preset", "a", "--out", str(first)]) == 0
    assert main(["preset", "a", "--out", str(second)]) == 0
    ok = first.read_bytes() == second.read_bytes() and first.stat().st_size > 0
    elapsed = time.perf_counter() - start
    _report(8, "deterministic output", ok, elapsed)
    assert ok

"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

import ewframes as ew
from ewframes import frames

from conftest import ACCEPTANCE_LINES, gaussian_rays_system, unit_partition

SEED = 12345


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def rel_err(x, y):
    return float(np.linalg.norm(x.samples - y.samples) / np.linalg.norm(y.samples))


@pytest.fixture(scope="module")
def shannon():
    return ew.build_system(unit_partition(-8, 8), ew.shannon())


@pytest.fixture(scope="module")
def gauss():
    return gaussian_rays_system()


@pytest.fixture(scope="module")
def gauss_probes(gauss):
    dt, n = ew.signal_grid(gauss, (-10, 10), 4096)
    rng = np.random.default_rng(SEED)
    return [ew.random_bandlimited(rng, dt, n, frames.analysis_window(gauss, (-10, 10))) for _ in range(5)]


@pytest.fixture(scope="module")
def gauss_report(gauss, gauss_probes):
    return ew.certify(gauss, gauss_probes, window=(-10, 10))


def test_criterion_1_continuous_parseval_sum():
    start = time.perf_counter()
    system = ew.build_system(unit_partition(-8, 8), ew.shannon())
    dev = ew.parseval_sum(system, frames.frequency_grid(-8, 8, 2**16)).deviation
    elapsed = time.perf_counter() - start
    report(1, dev < 1e-12 and elapsed < 5, f"sup|s-1| = {dev:.2e}, {elapsed:.2f} s")


def test_criterion_2_discrete_parseval(shannon):
    rep = ew.certify(shannon, lattice_half_width=4)
    worst = rep.max_cross_residual
    count = len(rep.cross_term_residuals)
    ok = worst < 1e-10 and rep.verdict == frames.PARSEVAL
    report(2, ok, f"{count} lattice points, max residual {worst:.2e}, verdict {rep.verdict}")


def test_criterion_3_energy_identity(shannon):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    dt, n = ew.signal_grid(shannon, (-8, 8), 4096)
    worst = 0.0
    for _ in range(20):
        f = ew.random_bandlimited(rng, dt, n, (-8, 8))
        worst = max(worst, abs(ew.dewt_forward(f, shannon).energy / f.norm_sq - 1))
    elapsed = time.perf_counter() - start
    ok = n == 4096 and worst < 1e-6 and elapsed < 10
    report(3, ok, f"N = {n}, max |ratio-1| = {worst:.2e}, {elapsed:.2f} s")


def test_criterion_4_frame_bounds(gauss_report):
    a, b = gauss_report.lower_a, gauss_report.bessel_b
    ratios = gauss_report.energy_ratios
    inside = all(a * (1 - 1e-6) <= r <= b * (1 + 1e-6) for r in ratios)
    ok = a > 0 and a <= b and inside
    report(4, ok, f"A = {a:.6f}, B = {b:.6f}, ratios in [{min(ratios):.6f}, {max(ratios):.6f}]")


def test_criterion_5_reconstruction(gauss, gauss_probes, shannon):
    f = gauss_probes[0]
    res = ew.reconstruct(ew.dewt_forward(f, gauss), gauss, tol=1e-12)
    err_g = rel_err(res.signal, f)
    rng = np.random.default_rng(SEED)
    dt, n = ew.signal_grid(shannon, (-8, 8), 4096)
    h = ew.random_bandlimited(rng, dt, n, (-8, 8))
    err_s = rel_err(ew.reconstruct(ew.dewt_forward(h, shannon), shannon, parseval=True).signal, h)
    ok = err_g <= 1e-6 and res.residual <= 1e-12 and err_s <= 1e-8
    report(5, ok, f"Gaussian CG error {err_g:.2e} (residual {res.residual:.1e}, "
                  f"{res.iterations} it), Shannon single pass {err_s:.2e}")


def test_criterion_6_ray_exclusion():
    bset = ew.BoundarySet.from_points([-math.inf, *range(-4, 5), math.inf])
    system = ew.build_system(ew.build_partition(bset), ew.shannon())
    rays = [a for a, s in zip(system.atoms, system.partition.supports) if not s.is_compact]
    rep = ew.certify(system, lattice_half_width=4)
    ok = (
        len(rays) == 2 and all(a.excluded for a in rays)
        and system.gamma.label.value == "c" and rep.region == (-4.0, 4.0)
        and rep.max_cross_residual < 1e-10
    )
    report(6, ok, f"rays excluded, gamma {system.gamma.label.value} {rep.region}, "
                  f"max residual {rep.max_cross_residual:.2e}")


def _direct_coefficients(f, system, steps):
    t = np.arange(f.n) * f.dt
    xi = np.fft.fftfreq(f.n, f.dt)
    kernel = np.exp(2j * np.pi * np.outer(t, xi)) / (f.n * f.dt)
    out = {}
    for atom in system.active:
        psi = kernel @ ew.filter_spectrum(system, atom.index, xi)
        s = steps[atom.index]
        rows = [np.roll(psi, (k * s) % f.n) for k in range(-(-f.n // s))]
        out[atom.index] = f.dt * np.array([[np.sum(f.samples * np.conj(r))] for r in rows]).ravel()
    return out


def test_criterion_7_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    system = ew.build_system(unit_partition(-2, 2), ew.meyer(0.2), ["1/4", "1/2", "1/2", "1/4"])
    f = ew.SampledSignal(rng.standard_normal(64) + 1j * rng.standard_normal(64), 1 / 16)
    coeffs = ew.dewt_forward(f, system)
    direct = _direct_coefficients(f, system, coeffs.steps)
    match = max(float(np.max(np.abs(coeffs.bands[n] - direct[n]))) for n in direct)
    d = coeffs.replace_values(
        {n: rng.standard_normal(c.size) + 1j * rng.standard_normal(c.size) for n, c in coeffs.bands.items()}
    )
    lhs, rhs = coeffs.inner(d), f.inner(ew.synthesize(d, system))
    dot = abs(lhs - rhs) / max(1.0, abs(lhs))
    report(7, match <= 1e-10 and dot <= 1e-10, f"max |FFT - direct| = {match:.2e}, dot-test {dot:.2e}")


def test_criterion_8_homogeneity(gauss, gauss_probes, gauss_report):
    rep3 = ew.certify(gauss.scaled(3.0), gauss_probes, window=(-10, 10))
    base = [gauss_report.lower_a, gauss_report.bessel_b, *gauss_report.energy_ratios]
    scaled = [rep3.lower_a, rep3.bessel_b, *rep3.energy_ratios]
    worst = max(abs(s / (9 * b) - 1) for s, b in zip(scaled, base))
    report(8, worst < 1e-10, f"max relative deviation from x9: {worst:.2e}")


def test_criterion_9_lic_stability():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for wavelet, shifts in ((ew.shannon(), "reciprocal"), (ew.meyer(0.2), ["1/2"] * 8)):
        system = ew.build_system(unit_partition(-4, 4), wavelet, shifts)
        dt, n = ew.signal_grid(system, (-4, 4), 1024)
        for _ in range(3):
            probe = ew.random_bandlimited(rng, dt, n, (-4, 4))
            for k in (None, 12):
                base = ew.lic_diagnostic(system, probe, k)
                k2 = 2 * max(base.k_ranges.values())
                doubled = ew.lic_diagnostic(system, probe, k2).value
                worst = max(worst, abs(doubled / base.value - 1))
    report(9, worst < 1e-9, f"max relative change on doubling kRange: {worst:.2e}")

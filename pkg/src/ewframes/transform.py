"""Continuous/discrete empirical wavelet transforms on a sampled grid.

A signal of N samples with spacing dt is treated as one period of a periodic
function. With F = fft(f) and Ψ_n the band filter sampled at fftfreq(N, dt),
the coefficient ⟨f, T_b ψ_n⟩ at b = m·dt is exactly ifft(F·conj(Ψ_n))[m]
(the Riemann sum of ⟨f̂, E_{-b} ψ̂_n⟩ with dξ = 1/(N·dt)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
import numpy.typing as npt
from scipy.sparse.linalg import LinearOperator, cg

from .errors import IncommensurateShiftStep, NotConverged, SystemMismatch, ValidationError
from .system import EmpiricalWaveletSystem, filter_spectrum

INTEGRALITY_RTOL = 1e-9
CEWT = "cewt"
DEWT = "dewt"


@dataclass(frozen=True, eq=False)
class SampledSignal:
    samples: np.ndarray
    dt: float

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=complex).reshape(-1)
        if x.size < 2:
            raise ValidationError(f"signal needs at least 2 samples, got {x.size}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"sample interval must be positive, got {self.dt}")
        if not np.all(np.isfinite(x)):
            raise ValidationError("signal contains non-finite samples")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    @property
    def frequencies(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, self.dt)

    @property
    def norm_sq(self) -> float:
        return self.dt * float(np.vdot(self.samples, self.samples).real)

    def inner(self, other: "SampledSignal") -> complex:
        """⟨self, other⟩ = dt Σ self·conj(other)."""
        return self.dt * complex(np.vdot(other.samples, self.samples))

    def with_samples(self, samples: npt.ArrayLike) -> "SampledSignal":
        return SampledSignal(np.asarray(samples), self.dt)


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Per-band coefficients; band n holds c_{n,k} at b = positions[n][k]·dt."""

    bands: dict[int, np.ndarray]
    mode: str
    steps: dict[int, int]
    length: int
    dt: float
    fingerprint: tuple = field(default=(), repr=False)

    def positions(self, n: int) -> np.ndarray:
        return _positions(self.steps[n], self.length)

    def shift_window(self, n: int) -> tuple[int, int]:
        return 0, self.bands[n].size

    @property
    def energy(self) -> float:
        return float(sum(np.vdot(c, c).real for c in self.bands.values()))

    def inner(self, other: "CoefficientSet") -> complex:
        return complex(sum(np.vdot(other.bands[n], c) for n, c in self.bands.items()))

    def replace_values(self, bands: dict[int, np.ndarray]) -> "CoefficientSet":
        for n, c in self.bands.items():
            if bands[n].shape != c.shape:
                raise SystemMismatch(f"band {n}: expected {c.size} coefficients")
        return CoefficientSet(
            {n: np.asarray(bands[n], dtype=complex) for n in self.bands},
            self.mode, self.steps, self.length, self.dt, self.fingerprint,
        )

    def zeros_like(self) -> "CoefficientSet":
        return self.replace_values({n: np.zeros_like(c) for n, c in self.bands.items()})


def _positions(step: int, length: int) -> np.ndarray:
    count = -(-length // abs(step))
    return (np.arange(count) * step) % length


def shift_steps(system: EmpiricalWaveletSystem, dt: float) -> dict[int, int]:
    """Integer sample steps b_n/dt; raises if some b_n is off the sample grid."""
    steps = {}
    for atom in system.active:
        ratio = atom.shift / dt
        k = round(ratio)
        if k == 0 or abs(ratio - k) > INTEGRALITY_RTOL * max(1.0, abs(ratio)):
            raise IncommensurateShiftStep(
                f"band {atom.index}: b_n = {atom.shift!r} is not a multiple of dt = {dt!r}"
            )
        steps[atom.index] = int(k)
    return steps


def _filters(system: EmpiricalWaveletSystem, n: int, dt: float) -> dict[int, np.ndarray]:
    xi = np.fft.fftfreq(n, dt)
    return {a.index: filter_spectrum(system, a.index, xi) for a in system.active}


def cewt_forward(f: SampledSignal, system: EmpiricalWaveletSystem) -> CoefficientSet:
    """⟨f, T_b ψ_n⟩ for every b on the signal grid and every active band."""
    spec = np.fft.fft(f.samples)
    bands = {n: np.fft.ifft(spec * np.conj(psi)) for n, psi in _filters(system, f.n, f.dt).items()}
    return CoefficientSet(
        bands, CEWT, {n: 1 for n in bands}, f.n, f.dt, system.fingerprint()
    )


def dewt_forward(f: SampledSignal, system: EmpiricalWaveletSystem) -> CoefficientSet:
    """⟨f, T_{k b_n} ψ_n⟩ for k = 0 .. ceil(N·dt/|b_n|) - 1."""
    steps = shift_steps(system, f.dt)
    full = cewt_forward(f, system)
    bands = {n: c[_positions(steps[n], f.n)] for n, c in full.bands.items()}
    return CoefficientSet(bands, DEWT, steps, f.n, f.dt, full.fingerprint)


def synthesize(coeffs: CoefficientSet, system: EmpiricalWaveletSystem) -> SampledSignal:
    """Σ_n Σ_k c_{n,k} ψ_{n,k}: the adjoint of the forward transform."""
    if coeffs.fingerprint != system.fingerprint():
        raise SystemMismatch("coefficients were computed with a different system")
    filters = _filters(system, coeffs.length, coeffs.dt)
    if set(filters) != set(coeffs.bands):
        raise SystemMismatch("band sets differ between coefficients and system")
    acc = np.zeros(coeffs.length, dtype=complex)
    for n, psi in filters.items():
        spread = np.zeros(coeffs.length, dtype=complex)
        np.add.at(spread, coeffs.positions(n), coeffs.bands[n])
        acc += np.fft.fft(spread) * psi
    return SampledSignal(np.fft.ifft(acc) / coeffs.dt, coeffs.dt)


def frame_operator_apply(f: SampledSignal, system: EmpiricalWaveletSystem) -> SampledSignal:
    return synthesize(dewt_forward(f, system), system)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    signal: SampledSignal
    residual: float
    iterations: int
    converged: bool


def reconstruct(
    coeffs: CoefficientSet,
    system: EmpiricalWaveletSystem,
    max_iter: int | None = None,
    tol: float = 1e-12,
    *,
    parseval: bool = False,
    lower_bound: float | None = None,
) -> ReconstructionResult:
    """Solve S g = synthesize(coeffs) with conjugate gradients.

    When the system targets a proper subspace L²_Γ (ray partitions) both
    sides are projected onto the DFT bins inside Γ, i.e. the solve uses the
    frame operator of the subspace, P S P. ``parseval=True`` skips the solve
    (S is the identity on L²_Γ). Raises NotConverged, carrying the best
    iterate, when the relative residual stays above ``tol``.
    """
    if lower_bound is not None and lower_bound <= 0:
        warnings.warn(
            f"lower frame bound {lower_bound:g} is not positive; inversion may be unstable",
            RuntimeWarning,
            stacklevel=2,
        )
    project = gamma_projector(system, coeffs.length, coeffs.dt)
    rhs = synthesize(coeffs, system)
    rhs = rhs.with_samples(project(rhs.samples))
    if parseval:
        return ReconstructionResult(rhs, 0.0, 1, True)
    b = rhs.samples
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return ReconstructionResult(rhs, 0.0, 0, True)

    dt = coeffs.dt
    if coeffs.mode == CEWT:
        def forward(f):
            return cewt_forward(f, system)
    else:
        def forward(f):
            return dewt_forward(f, system)

    def apply(x):
        return project(synthesize(forward(SampledSignal(project(x), dt)), system).samples)

    op = LinearOperator((b.size, b.size), matvec=apply, dtype=complex)
    count = [0]

    def tick(_):
        count[0] += 1

    max_iter = 10 * b.size if max_iter is None else max_iter
    x, _ = cg(op, b, rtol=tol, atol=0.0, maxiter=max_iter, callback=tick)
    residual = float(np.linalg.norm(apply(x) - b) / bnorm)
    result = ReconstructionResult(SampledSignal(x, dt), residual, count[0], residual <= tol)
    if not result.converged:
        raise NotConverged(
            f"relative residual {residual:.3e} > {tol:.1e} after {count[0]} iterations", result
        )
    return result


def gamma_projector(system: EmpiricalWaveletSystem, n: int, dt: float):
    """Orthogonal projection onto signals whose DFT lives inside Γ."""
    if system.gamma.is_full:
        return lambda x: x
    keep = system.gamma.mask(np.fft.fftfreq(n, dt))

    def project(x):
        spec = np.fft.fft(x)
        spec[~keep] = 0.0
        return np.fft.ifft(spec)

    return project


# grid helpers


def _as_fraction(x: float, exact: Fraction | None) -> Fraction:
    if exact is not None:
        return abs(exact)
    frac = Fraction(abs(x)).limit_denominator(10**6)
    if abs(float(frac) - abs(x)) > INTEGRALITY_RTOL * abs(x):
        raise IncommensurateShiftStep(f"shift step {x!r} has no small rational form")
    return frac


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator), math.lcm(a.denominator, b.denominator))


def _frac_lcm(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.lcm(a.numerator, b.numerator), math.gcd(a.denominator, b.denominator))


def signal_grid(
    system: EmpiricalWaveletSystem, window: tuple[float, float], min_samples: int = 4096
) -> tuple[float, int]:
    """Pick (dt, N) so the DFT band covers ``window``, every b_n is a multiple
    of dt and the period N·dt is a multiple of every b_n."""
    fracs = [_as_fraction(a.shift, a.shift_exact) for a in system.active]
    g = reduce(_frac_gcd, fracs)
    period = reduce(_frac_lcm, fracs)
    reach = max(abs(window[0]), abs(window[1]))
    m = max(1, math.ceil(2 * reach * g))
    dt = g / m
    unit = int(period / dt)
    n = unit * max(1, -(-min_samples // unit))
    return float(dt), n


def random_bandlimited(
    rng: np.random.Generator,
    dt: float,
    n: int,
    band: tuple[float, float],
) -> SampledSignal:
    """Random complex signal whose DFT lives on bins ξ ∈ [band[0], band[1])."""
    xi = np.fft.fftfreq(n, dt)
    mask = (xi >= band[0]) & (xi < band[1])
    if not mask.any():
        raise ValidationError(f"no frequency bins inside {band}")
    spec = np.zeros(n, dtype=complex)
    k = int(mask.sum())
    spec[mask] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return SampledSignal(np.fft.ifft(spec), dt)

"""Numerical frame certificates for empirical wavelet systems.

All conditions are checked on uniform half-open frequency grids. For
partitions with rays the evaluation region is the Γ region of the system
(the union of its compact supports), intersected with an optional window.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AlphaNotInLattice,
    InconsistentCertificate,
    NegativeScaleOnCompact,
    TruncationInsufficient,
    ValidationError,
)
from .system import BandAtom, EmpiricalWaveletSystem
from .transform import SampledSignal, dewt_forward

GRID_ENV = "EWF_GRID_POINTS"
DEFAULT_GRID_POINTS = 2**16
LATTICE_RTOL = 1e-9
DELTA_TOL = 1e-8
BOUND_TAIL_RTOL = 1e-12
LIC_TAIL_RTOL = 1e-9
RATIO_RTOL = 1e-6

PARSEVAL = "ParsevalCertified"
FRAME = "FrameCertified"
BESSEL = "BesselOnly"
INDETERMINATE = "Indeterminate"


def default_grid_points() -> int:
    raw = os.environ.get(GRID_ENV)
    if raw is None:
        return DEFAULT_GRID_POINTS
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{GRID_ENV} must be an integer, got {raw!r}") from None
    if n < 16:
        raise ValidationError(f"{GRID_ENV} must be at least 16")
    return n


def frequency_grid(lo: float, hi: float, n: int | None = None) -> np.ndarray:
    """``n`` uniform points on [lo, hi)."""
    n = default_grid_points() if n is None else n
    if not lo < hi:
        raise ValidationError(f"empty frequency window [{lo}, {hi})")
    return np.linspace(lo, hi, n, endpoint=False)


def analysis_window(
    system: EmpiricalWaveletSystem, window: tuple[float, float] | None = None
) -> tuple[float, float]:
    """Γ bounds clipped to ``window``; the partition span if Γ is the full line."""
    if system.gamma.is_full:
        return tuple(window) if window is not None else system.partition.finite_span
    lo, hi = system.gamma.bounds
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if not lo < hi:
        raise ValidationError("window does not meet the Γ region")
    return lo, hi


def _weight(atom: BandAtom) -> float:
    return 1.0 / (abs(atom.shift) * abs(atom.scale))


def _bands_meeting(system, lo, hi, pad=0.0):
    out = []
    for atom in system.active:
        r0, r1 = system.reach(atom)
        if r1 >= lo - pad and r0 <= hi + pad:
            out.append(atom)
    return out


# continuous Parseval sum


@dataclass(frozen=True, eq=False)
class ParsevalSum:
    xi: np.ndarray
    signed: np.ndarray
    absolute: np.ndarray
    deviation: float
    deviation_abs: float
    bands_used: tuple[int, ...]
    negative_scale_bands: tuple[int, ...]


def parseval_sum(system: EmpiricalWaveletSystem, xi: np.ndarray) -> ParsevalSum:
    """s(ξ) = Σ_n (1/a_n)|ψ̂((ξ - ω_n)/a_n)|² and sup|s - 1| over ξ ∈ Γ.

    The sum uses 1/a_n with its sign; the absolute-value variant is returned
    alongside since ray bands may carry negative scales.
    """
    xi = np.asarray(xi, dtype=float)
    negative = []
    for atom in system.active:
        if atom.scale < 0:
            if system.partition.support(atom.index).is_compact:
                raise NegativeScaleOnCompact(
                    f"band {atom.index} is compact but has a_n = {atom.scale}"
                )
            negative.append(atom.index)
    if negative:
        warnings.warn(
            f"ray bands {negative} have negative scale factors; signed and absolute "
            "Parseval sums differ",
            RuntimeWarning,
            stacklevel=2,
        )
    signed = np.zeros(xi.shape)
    absolute = np.zeros(xi.shape)
    used = _bands_meeting(system, xi.min(), xi.max())
    for atom in used:
        term = np.abs(system.core(atom, xi)) ** 2
        signed += term / atom.scale
        absolute += term / abs(atom.scale)
    mask = system.gamma.mask(xi)
    dev = float(np.max(np.abs(signed[mask] - 1.0))) if mask.any() else math.nan
    dev_abs = float(np.max(np.abs(absolute[mask] - 1.0))) if mask.any() else math.nan
    return ParsevalSum(
        xi, signed, absolute, dev, dev_abs, tuple(a.index for a in used), tuple(negative)
    )


# lattice and cross terms


@dataclass(frozen=True)
class AlphaLattice:
    """Λ ∩ [-half_width, half_width] with Λ = ∪_n b_n^{-1} ℤ."""

    half_width: float
    elements: tuple
    members: dict = field(repr=False)
    exact: bool = False

    def bands_for(self, alpha) -> tuple[int, ...]:
        key = self._key(alpha)
        if key is None:
            raise AlphaNotInLattice(f"α = {alpha} is not in the lattice")
        return self.members[key]

    def _key(self, alpha):
        if self.exact:
            a = Fraction(alpha)
            return a if a in self.members else None
        for el in self.elements:
            if abs(float(el) - float(alpha)) <= LATTICE_RTOL * max(1.0, abs(float(el))):
                return el
        return None


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= LATTICE_RTOL * max(1.0, abs(x))


def alpha_lattice(system: EmpiricalWaveletSystem, half_width: float) -> AlphaLattice:
    atoms = system.active
    exact = all(a.shift_exact is not None for a in atoms)
    candidates = []
    for atom in atoms:
        kmax = int(math.floor(half_width * abs(atom.shift) * (1 + LATTICE_RTOL)))
        for k in range(-kmax, kmax + 1):
            if exact:
                candidates.append(Fraction(k) / atom.shift_exact)
            else:
                candidates.append(k / atom.shift)
    if exact:
        elements = sorted(set(candidates))
        members = {
            al: tuple(a.index for a in atoms if (a.shift_exact * al).denominator == 1)
            for al in elements
        }
    else:
        elements = []
        for c in sorted(candidates):
            if elements and abs(c - elements[-1]) <= LATTICE_RTOL * max(1.0, abs(c)):
                continue
            elements.append(0.0 if c == 0 else c)
        members = {
            al: tuple(a.index for a in atoms if _is_integer(a.shift * al)) for al in elements
        }
    return AlphaLattice(float(half_width), tuple(elements), members, exact)


def cross_term(
    system: EmpiricalWaveletSystem,
    alpha: float,
    xi: np.ndarray,
    lattice: AlphaLattice | None = None,
) -> np.ndarray:
    """G_α(ξ) = Σ_{n∈𝒩_α} ψ̂((ξ-ω_n)/a_n) conj ψ̂((ξ+α-ω_n)/a_n) / (|b_n||a_n|)."""
    xi = np.asarray(xi, dtype=float)
    if lattice is None:
        members = tuple(a.index for a in system.active if _is_integer(a.shift * float(alpha)))
        if not members:
            raise AlphaNotInLattice(f"α = {alpha} is not in the lattice")
    else:
        members = lattice.bands_for(alpha)
    a_f = float(alpha)
    out = np.zeros(xi.shape, dtype=complex)
    lo, hi = xi.min(), xi.max()
    for n in members:
        atom = system.atom(n)
        r0, r1 = system.reach(atom)
        if r1 < lo or r0 > hi:
            continue
        out += _weight(atom) * system.core(atom, xi) * np.conj(system.core(atom, xi + a_f))
    return out


# frame bounds


@dataclass(frozen=True, eq=False)
class BoundTerms:
    xi: np.ndarray
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    tail: np.ndarray
    k_ranges: dict[int, int]

    @property
    def upper(self) -> np.ndarray:
        return self.diagonal + self.off_diagonal

    @property
    def lower(self) -> np.ndarray:
        return self.diagonal - self.off_diagonal


def _auto_k(system: EmpiricalWaveletSystem, atom: BandAtom) -> int:
    r0, r1 = system.reach(atom)
    return int(math.ceil((r1 - r0) * abs(atom.shift))) + 1


def bound_terms(
    system: EmpiricalWaveletSystem, xi: np.ndarray, k_range: int | None = None
) -> BoundTerms:
    """Pointwise diagonal, |k| ≤ K off-diagonal and K < |k| ≤ 2K tail sums."""
    xi = np.asarray(xi, dtype=float)
    diag = np.zeros(xi.shape)
    off = np.zeros(xi.shape)
    tail = np.zeros(xi.shape)
    kr = {}
    for atom in _bands_meeting(system, xi.min(), xi.max()):
        k_max = _auto_k(system, atom) if k_range is None else int(k_range)
        kr[atom.index] = k_max
        w = _weight(atom)
        base = np.abs(system.core(atom, xi))
        diag += w * base**2
        live = base > 0
        if not live.any():
            continue
        xl = xi[live]
        bl = base[live]
        step = 1.0 / atom.shift
        for k in range(1, 2 * k_max + 1):
            pair = np.abs(system.core(atom, xl - k * step)) + np.abs(system.core(atom, xl + k * step))
            if k <= k_max:
                off[live] += w * bl * pair
            else:
                tail[live] += w * bl * pair
    return BoundTerms(xi, diag, off, tail, kr)


@dataclass(frozen=True)
class BoundResult:
    value: float
    tail: float
    k_ranges: dict[int, int]


def _check_tail(terms: BoundTerms, mask: np.ndarray) -> float:
    tail = float(terms.tail[mask].max()) if mask.any() else 0.0
    scale = float(terms.upper[mask].max()) if mask.any() else 0.0
    if tail > BOUND_TAIL_RTOL * scale:
        raise TruncationInsufficient(
            f"tail estimate {tail:.3e} exceeds {BOUND_TAIL_RTOL:g} of the bound; enlarge k_range"
        )
    return tail


def bessel_bound(
    system: EmpiricalWaveletSystem, xi: np.ndarray, k_range: int | None = None,
    terms: BoundTerms | None = None,
) -> BoundResult:
    """B = sup_ξ Σ_n Σ_k |ψ̂_n-core(ξ) ψ̂_n-core(ξ - k/b_n)| / (|b_n||a_n|)."""
    terms = bound_terms(system, xi, k_range) if terms is None else terms
    mask = system.gamma.mask(terms.xi)
    tail = _check_tail(terms, mask)
    return BoundResult(float(terms.upper[mask].max()), tail, terms.k_ranges)


def lower_bound(
    system: EmpiricalWaveletSystem, xi: np.ndarray, k_range: int | None = None,
    terms: BoundTerms | None = None,
) -> BoundResult:
    """A = inf_ξ (diagonal - Σ_{k≠0} off-diagonal)."""
    terms = bound_terms(system, xi, k_range) if terms is None else terms
    mask = system.gamma.mask(terms.xi)
    tail = _check_tail(terms, mask)
    return BoundResult(float(terms.lower[mask].min()), tail, terms.k_ranges)


# local integrability


@dataclass(frozen=True)
class LicResult:
    value: float
    tail: float
    k_ranges: dict[int, int]


def lic_diagnostic(
    system: EmpiricalWaveletSystem,
    probe: SampledSignal,
    k_range: int | None = None,
    support_rtol: float = 1e-12,
) -> LicResult:
    """Truncated L(f) = Σ_n Σ_m ∫_{supp f̂} |f̂(ξ + m/b_n)|² |ψ̂_n-core(ξ)|² /(|b_n||a_n|) dξ.

    f̂ is the probe's DFT (scaled by dt) viewed as a function on the line that
    vanishes outside the DFT band; shifted values are linearly interpolated.
    """
    order = np.argsort(probe.frequencies)
    xi = probe.frequencies[order]
    power = np.abs(probe.dt * np.fft.fft(probe.samples)[order]) ** 2
    dxi = 1.0 / (probe.n * probe.dt)
    peak = power.max()
    if peak == 0:
        return LicResult(0.0, 0.0, {})
    supp = power > (support_rtol**2) * peak
    xs = xi[supp]
    span = xs.max() - xs.min() + dxi
    total = 0.0
    tail = 0.0
    kr = {}
    for atom in system.active:
        w = _weight(atom)
        core2 = np.abs(system.core(atom, xs)) ** 2
        if not core2.any():
            continue
        k_max = int(math.ceil(span * abs(atom.shift))) + 1 if k_range is None else int(k_range)
        kr[atom.index] = k_max
        for m in range(-2 * k_max, 2 * k_max + 1):
            shifted = np.interp(xs + m / atom.shift, xi, power, left=0.0, right=0.0)
            val = dxi * w * float(np.sum(shifted * core2))
            if abs(m) <= k_max:
                total += val
            else:
                tail += val
    if tail > LIC_TAIL_RTOL * total:
        raise TruncationInsufficient(
            f"LIC tail {tail:.3e} exceeds {LIC_TAIL_RTOL:g} of the truncated sum"
        )
    return LicResult(total, tail, kr)


# certificate


@dataclass(frozen=True)
class CrossTermResidual:
    alpha: float
    residual: float
    bands: tuple[int, ...]
    exact: str | None = None


@dataclass(frozen=True)
class FrameReport:
    verdict: str
    parseval_sum_deviation: float
    parseval_sum_deviation_abs: float
    cross_term_residuals: tuple[CrossTermResidual, ...]
    bessel_b: float
    lower_a: float
    refinement_delta_a: float
    refinement_delta_b: float
    tail_bound: float
    lic_values: tuple[float, ...]
    energy_ratios: tuple[float, ...]
    region: tuple[float, float]
    gamma: dict
    grid_points: int
    bands: tuple[int, ...]
    k_ranges: dict
    lattice_half_width: float
    negative_scale_bands: tuple[int, ...] = ()

    @property
    def max_cross_residual(self) -> float:
        return max(r.residual for r in self.cross_term_residuals)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "parsevalSumDeviation": self.parseval_sum_deviation,
            "parsevalSumDeviationAbs": self.parseval_sum_deviation_abs,
            "crossTermResiduals": [
                {"alpha": r.alpha, "alphaExact": r.exact, "residual": r.residual, "bands": list(r.bands)}
                for r in self.cross_term_residuals
            ],
            "besselB": self.bessel_b,
            "lowerA": self.lower_a,
            "refinementDeltaA": self.refinement_delta_a,
            "refinementDeltaB": self.refinement_delta_b,
            "tailBound": self.tail_bound,
            "licValues": list(self.lic_values),
            "energyRatios": list(self.energy_ratios),
            "negativeScaleBands": list(self.negative_scale_bands),
            "truncation": {
                "region": list(self.region),
                "gamma": self.gamma,
                "gridPoints": self.grid_points,
                "refinedGridPoints": 2 * self.grid_points,
                "bands": list(self.bands),
                "kRanges": {str(k): v for k, v in sorted(self.k_ranges.items())},
                "latticeHalfWidth": self.lattice_half_width,
            },
        }


def certify(
    system: EmpiricalWaveletSystem,
    probes: Sequence[SampledSignal] = (),
    *,
    window: tuple[float, float] | None = None,
    grid_points: int | None = None,
    lattice_half_width: float | None = None,
    k_range: int | None = None,
) -> FrameReport:
    """Run every frame check and cross-validate against probe energy ratios."""
    lo, hi = analysis_window(system, window)
    n = default_grid_points() if grid_points is None else grid_points
    xi = frequency_grid(lo, hi, n)
    xi_fine = frequency_grid(lo, hi, 2 * n)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ps = parseval_sum(system, xi_fine)

    half = (hi - lo) if lattice_half_width is None else lattice_half_width
    lattice = alpha_lattice(system, half)
    mask = system.gamma.mask(xi)
    residuals = []
    for alpha in lattice.elements:
        g = cross_term(system, alpha, xi, lattice)
        target = 1.0 if alpha == 0 else 0.0
        res = float(np.max(np.abs(g[mask] - target)))
        exact = str(alpha) if lattice.exact else None
        residuals.append(CrossTermResidual(float(alpha), res, lattice.bands_for(alpha), exact))

    coarse = bound_terms(system, xi, k_range)
    fine = bound_terms(system, xi_fine, k_range)
    b0, b1 = bessel_bound(system, xi, terms=coarse), bessel_bound(system, xi_fine, terms=fine)
    a0, a1 = lower_bound(system, xi, terms=coarse), lower_bound(system, xi_fine, terms=fine)
    big_b = max(b0.value, b1.value)
    small_a = min(a0.value, a1.value)

    lics = tuple(lic_diagnostic(system, p).value for p in probes)
    ratios = []
    for p in probes:
        norm = p.norm_sq
        ratios.append(dewt_forward(p, system).energy / norm if norm > 0 else math.nan)

    parseval_ok = all(r.residual <= DELTA_TOL for r in residuals)
    if parseval_ok:
        verdict = PARSEVAL
    elif small_a > 0 and math.isfinite(big_b):
        verdict = FRAME
    elif math.isfinite(big_b):
        verdict = BESSEL
    else:
        verdict = INDETERMINATE

    report = FrameReport(
        verdict=verdict,
        parseval_sum_deviation=ps.deviation,
        parseval_sum_deviation_abs=ps.deviation_abs,
        cross_term_residuals=tuple(residuals),
        bessel_b=big_b,
        lower_a=small_a,
        refinement_delta_a=abs(a1.value - a0.value),
        refinement_delta_b=abs(b1.value - b0.value),
        tail_bound=max(b0.tail, b1.tail),
        lic_values=lics,
        energy_ratios=tuple(ratios),
        region=(float(lo), float(hi)),
        gamma=system.gamma.to_dict(),
        grid_points=n,
        bands=tuple(a.index for a in system.active),
        k_ranges=dict(fine.k_ranges),
        lattice_half_width=float(half),
        negative_scale_bands=ps.negative_scale_bands,
    )

    for i, r in enumerate(ratios):
        ok = small_a * (1 - RATIO_RTOL) <= r <= big_b * (1 + RATIO_RTOL)
        if verdict == PARSEVAL:
            ok = ok and abs(r - 1.0) <= RATIO_RTOL
        if not ok:
            exc = InconsistentCertificate(
                f"probe {i}: energy ratio {r!r} outside [{small_a!r}, {big_b!r}]"
            )
            exc.report = report
            raise exc
    return report

"""Mother wavelets described by their spectral profile, plus scale factors."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy import integrate

from .errors import (
    CompactSupportRayUnsupported,
    EmptyEssentialSupport,
    InvalidProfile,
    NonIntegrableProfile,
    ValidationError,
    ZeroLengthSupport,
)

QUAD_RTOL = 1e-10
ZERO_TOL = 1e-14  # relative to max|ψ̂|
DEFAULT_DELTA = 0.01

Profile = Callable[[np.ndarray], np.ndarray]


class SupportShape(str, enum.Enum):
    COMPACT = "compact"
    LEFT_RAY = "left_ray"  # (-inf, hi]
    RIGHT_RAY = "right_ray"  # [lo, inf)
    FULL_LINE = "full_line"


@dataclass(frozen=True)
class SupportDescriptor:
    shape: SupportShape
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        shape = SupportShape(self.shape)
        object.__setattr__(self, "shape", shape)
        lo, hi = float(self.lo), float(self.hi)
        if shape is SupportShape.COMPACT:
            ok = math.isfinite(lo) and math.isfinite(hi) and lo < hi
        elif shape is SupportShape.LEFT_RAY:
            lo, ok = -math.inf, math.isfinite(hi)
        elif shape is SupportShape.RIGHT_RAY:
            hi, ok = math.inf, math.isfinite(lo)
        else:
            lo, hi, ok = -math.inf, math.inf, True
        if not ok:
            raise ValidationError(f"bad bounds for {shape.value} support: {self.lo}, {self.hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def compact(cls, lo: float, hi: float) -> "SupportDescriptor":
        return cls(SupportShape.COMPACT, lo, hi)

    @property
    def is_compact(self) -> bool:
        return self.shape is SupportShape.COMPACT

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, xi: np.ndarray) -> np.ndarray:
        return (xi >= self.lo) & (xi <= self.hi)

    def to_dict(self) -> dict:
        out: dict = {"shape": self.shape.value}
        if math.isfinite(self.lo):
            out["lo"] = self.lo
        if math.isfinite(self.hi):
            out["hi"] = self.hi
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SupportDescriptor":
        return cls(
            SupportShape(data["shape"]),
            data.get("lo", -math.inf),
            data.get("hi", math.inf),
        )


@dataclass(frozen=True)
class EssentialSupport:
    """Symmetric interval E = [lo, hi] holding a (1 - δ) share of ‖ψ̂‖²."""

    lo: float
    hi: float
    delta: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True, eq=False)
class MotherWavelet:
    """A mother wavelet given in the frequency domain.

    ``profile`` maps a numpy array of frequencies to ψ̂ values and must be
    pure. ``breakpoints`` lists the frequencies where ψ̂ (or a derivative)
    jumps, so quadrature can split there. ``default_overlap`` is the |S_n|/|Ω_n|
    ratio this profile is designed for (1 for Shannon, 1 + 2τ for Meyer).
    """

    profile: Profile
    support: SupportDescriptor
    name: str = "custom"
    params: dict = field(default_factory=dict)
    breakpoints: tuple[float, ...] = ()
    l2_norm_sq: float | None = None
    essential: EssentialSupport | None = None
    default_overlap: float = 1.0
    integrator: Callable[[float, float], float] | None = None

    def __post_init__(self):
        if self.l2_norm_sq is None:
            object.__setattr__(self, "l2_norm_sq", self.energy(-math.inf, math.inf))
        if not (math.isfinite(self.l2_norm_sq) and self.l2_norm_sq > 0):
            raise InvalidProfile(f"‖ψ̂‖² must be finite and positive, got {self.l2_norm_sq}")
        if self.support.is_compact:
            self.validate_support()

    def __call__(self, xi: npt.ArrayLike) -> np.ndarray:
        return np.asarray(self.profile(np.asarray(xi, dtype=float)))

    def energy(self, lo: float, hi: float) -> float:
        """∫_lo^hi |ψ̂|², clipped to the declared support."""
        lo, hi = max(lo, self.support.lo), min(hi, self.support.hi)
        if not lo < hi:
            return 0.0
        if self.integrator is not None:
            return self.integrator(lo, hi)
        cuts = [lo] + [b for b in sorted(self.breakpoints) if lo < b < hi] + [hi]
        total = 0.0

        def sq(x):
            return float(np.abs(self.profile(np.array([x], dtype=float))[0]) ** 2)

        for a, b in zip(cuts, cuts[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, err = integrate.quad(sq, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
                except integrate.IntegrationWarning as exc:
                    raise NonIntegrableProfile(f"quadrature on [{a}, {b}] failed: {exc}") from None
            if not math.isfinite(val):
                raise NonIntegrableProfile(f"∫|ψ̂|² diverges on [{a}, {b}]")
            total += val
        return total

    def scaled(self, c: complex) -> "MotherWavelet":
        """The wavelet c·ψ̂; supports and essential support are unchanged."""
        base = self.profile
        return replace(
            self,
            profile=lambda xi: c * base(xi),
            l2_norm_sq=abs(c) ** 2 * self.l2_norm_sq,
            name=f"{self.name}*{c}",
            integrator=None if self.integrator is None else (
                lambda lo, hi, f=self.integrator: abs(c) ** 2 * f(lo, hi)
            ),
            params={**self.params, "amplitude": c},
        )

    def with_essential(self, delta: float = DEFAULT_DELTA) -> "MotherWavelet":
        return replace(self, essential=essential_support(self, delta))

    def essential_or_default(self) -> EssentialSupport:
        return self.essential if self.essential is not None else essential_support(self, DEFAULT_DELTA)

    def validate_support(self, n: int = 8193) -> None:
        """Check |ψ̂| vanishes (to ZERO_TOL·max) outside a compact support."""
        s = self.support
        pad = s.length
        xi = np.linspace(s.lo - pad, s.hi + pad, n)
        vals = np.abs(self(xi))
        peak = vals.max()
        if peak <= 0:
            raise InvalidProfile("profile vanishes on its support")
        outside = ~s.contains(xi)
        if np.any(vals[outside] > ZERO_TOL * peak):
            raise InvalidProfile(f"profile is nonzero outside declared support [{s.lo}, {s.hi}]")

    def is_localized(self, n: int = 8193) -> bool:
        """Whether max|ψ̂| on a grid is attained inside the essential support."""
        ess = self.essential_or_default()
        span = 4 * max(abs(ess.lo), abs(ess.hi))
        lo, hi = max(-span, self.support.lo), min(span, self.support.hi)
        xi = np.linspace(lo, hi, n)
        vals = np.abs(self(xi))
        return bool(ess.lo <= xi[int(np.argmax(vals))] <= ess.hi)


def essential_support(wavelet: MotherWavelet, delta: float) -> EssentialSupport:
    """Smallest symmetric [-e, e] carrying at least (1 - δ)‖ψ̂‖² (bisection on e)."""
    if not 0.0 <= delta < 1.0:
        raise ValidationError(f"δ must lie in [0, 1), got {delta}")
    s = wavelet.support
    if delta == 0.0:
        if not s.is_compact:
            raise EmptyEssentialSupport("δ = 0 needs a compactly supported profile")
        return EssentialSupport(s.lo, s.hi, 0.0)

    total = wavelet.l2_norm_sq
    target = (1.0 - delta) * total

    def mass(e):
        return wavelet.energy(-e, e)

    if s.is_compact:
        hi = max(abs(s.lo), abs(s.hi))
    else:
        hi = 1.0
        for _ in range(64):
            if mass(hi) >= target:
                break
            hi *= 2.0
        else:
            raise NonIntegrableProfile("essential support search did not terminate")
    lo = 0.0
    for _ in range(200):
        if hi - lo <= 1e-15 * hi:
            break
        mid = 0.5 * (lo + hi)
        if mass(mid) >= target:
            hi = mid
        else:
            lo = mid
    if hi <= 0:
        raise EmptyEssentialSupport("essential support collapsed to a point")
    return EssentialSupport(-hi, hi, delta)


def scale_factor_compact(band_length: float, wavelet: MotherWavelet, overlap: float = 1.0) -> float:
    """a_n = |S_n| / |S| with |S_n| = overlap · |Ω_n|."""
    if not wavelet.support.is_compact:
        raise ValidationError("scale_factor_compact needs a compactly supported wavelet")
    if not (math.isfinite(band_length) and band_length > 0):
        raise ZeroLengthSupport(f"band length must be positive and finite, got {band_length}")
    if overlap < 1.0:
        raise ValidationError("overlap multiplier must be ≥ 1 so that Ω_n ⊆ S_n")
    return overlap * band_length / wavelet.support.length


def scale_factor_essential(band_length: float, essential_width: float) -> float:
    """a_n = |Ω_n| / |E|."""
    if not essential_width > 0:
        raise EmptyEssentialSupport("essential support has zero width")
    if not (math.isfinite(band_length) and band_length > 0):
        raise ZeroLengthSupport(f"band length must be positive and finite, got {band_length}")
    return band_length / essential_width


def scale_factor_ray(
    side: str, center: float, boundary: float, wavelet: MotherWavelet, essential_width: float
) -> float:
    """Scale factor of a ray band.

    ``side`` is "left" (boundary is ν_{n_m+1}) or "right" (boundary is
    ν_{n_M-1}). The magnitude is twice the center-to-boundary distance over
    |E|; the sign flips when a one-sided support points away from the ray.
    """
    shape = wavelet.support.shape
    if shape is SupportShape.COMPACT:
        raise CompactSupportRayUnsupported(
            "a compactly supported ψ̂ cannot cover a ray; exclude the band"
        )
    if not essential_width > 0:
        raise EmptyEssentialSupport("essential support has zero width")
    if side == "left":
        mag = 2.0 * (boundary - center) / essential_width
        sign = -1.0 if shape is SupportShape.RIGHT_RAY else 1.0
    elif side == "right":
        mag = 2.0 * (center - boundary) / essential_width
        sign = -1.0 if shape is SupportShape.LEFT_RAY else 1.0
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    if not mag > 0:
        raise ZeroLengthSupport("ray center coincides with its boundary")
    return sign * mag


# built-in profiles


def shannon() -> MotherWavelet:
    """Indicator of [-1/2, 1/2); half-open so shifted copies tile the line."""

    def profile(xi):
        return ((xi >= -0.5) & (xi < 0.5)).astype(float)

    return MotherWavelet(
        profile,
        SupportDescriptor.compact(-0.5, 0.5),
        name="shannon",
        breakpoints=(-0.5, 0.5),
        l2_norm_sq=1.0,
    )


def meyer_transition(x: np.ndarray) -> np.ndarray:
    """Polynomial ramp β with β(x) + β(1 - x) = 1 on [0, 1]."""
    x = np.clip(x, 0.0, 1.0)
    return x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)


def meyer(tau: float = 0.1) -> MotherWavelet:
    """Meyer-type bump: flat on |ξ| ≤ 1/2 - τ, cosine-β ramp to zero at 1/2 + τ.

    Unit-spaced copies satisfy Σ|ψ̂(ξ - n)|² = 1, so the intended overlap is
    |S|/1 = 1 + 2τ.
    """
    if not 0.0 < tau <= 0.5:
        raise ValidationError(f"Meyer transition half-width must be in (0, 1/2], got {tau}")
    inner, outer = 0.5 - tau, 0.5 + tau

    def profile(xi):
        r = np.abs(xi)
        out = np.cos(0.5 * np.pi * meyer_transition((r - inner) / (2.0 * tau)))
        return np.where(r < outer, out, 0.0)

    bps = (-outer, -inner, inner, outer)
    return MotherWavelet(
        profile,
        SupportDescriptor.compact(-outer, outer),
        name="meyer",
        params={"tau": tau},
        breakpoints=bps,
        default_overlap=1.0 + 2.0 * tau,
    )


def gaussian() -> MotherWavelet:
    """ψ̂(ξ) = exp(-πξ²), supported on the whole line."""

    def profile(xi):
        return np.exp(-np.pi * xi**2)

    return MotherWavelet(
        profile,
        SupportDescriptor(SupportShape.FULL_LINE),
        name="gaussian",
        breakpoints=(0.0,),
        l2_norm_sq=1.0 / math.sqrt(2.0),
    )


def from_samples(
    xi: npt.ArrayLike,
    values: npt.ArrayLike,
    support: SupportDescriptor | None = None,
) -> MotherWavelet:
    """Profile linearly interpolated from samples, zero outside their range."""
    xs = np.asarray(xi, dtype=float)
    vs = np.asarray(values, dtype=complex)
    if xs.ndim != 1 or xs.size < 2 or xs.shape != vs.shape:
        raise InvalidProfile("need at least two (ξ, ψ̂) samples of matching length")
    if np.any(np.diff(xs) <= 0):
        raise InvalidProfile("sample frequencies must be strictly increasing")
    re, im = vs.real.copy(), vs.imag.copy()
    is_real = not np.any(im)

    def profile(x):
        r = np.interp(x, xs, re, left=0.0, right=0.0)
        if is_real:
            return r
        return r + 1j * np.interp(x, xs, im, left=0.0, right=0.0)

    def integrator(lo, hi):
        # |linear|² is quadratic per segment, so Simpson is exact
        nodes = np.concatenate(([lo], xs[(xs > lo) & (xs < hi)], [hi]))
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        f0, fm, f1 = (np.abs(profile(v)) ** 2 for v in (nodes[:-1], mids, nodes[1:]))
        return float(np.sum(np.diff(nodes) * (f0 + 4 * fm + f1) / 6.0))

    if support is None:
        support = SupportDescriptor.compact(xs[0], xs[-1])
    return MotherWavelet(
        profile,
        support,
        name="custom",
        breakpoints=tuple(xs.tolist()),
        integrator=integrator,
    )

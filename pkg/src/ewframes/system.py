"""Empirical wavelet systems: per-band centers, scales and shift steps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np
import numpy.typing as npt

from .errors import (
    CompactSupportRayUnsupported,
    EmptySystem,
    ExcludedBand,
    ValidationError,
)
from .partition import GammaRegion, Partition, compute_centers, gamma_region
from .wavelets import (
    MotherWavelet,
    essential_support,
    scale_factor_compact,
    scale_factor_essential,
    scale_factor_ray,
)

TAIL_MASS = 1e-14

ShiftSpec = Union[str, Sequence, Mapping]


@dataclass(frozen=True)
class BandAtom:
    index: int
    center: float
    scale: float | None
    shift: float | None
    excluded: bool = False
    shift_exact: Fraction | None = None

    def __post_init__(self):
        if not self.excluded:
            if not self.scale or not math.isfinite(self.scale):
                raise ValidationError(f"band {self.index}: scale factor must be nonzero")
            if not self.shift or not math.isfinite(self.shift):
                raise ValidationError(f"band {self.index}: shift step must be nonzero")

    def to_dict(self) -> dict:
        return {
            "n": self.index,
            "center": self.center,
            "scale": self.scale,
            "shift": self.shift,
            "excluded": self.excluded,
        }


@dataclass(frozen=True, eq=False)
class EmpiricalWaveletSystem:
    partition: Partition
    wavelet: MotherWavelet
    atoms: tuple[BandAtom, ...]
    gamma: GammaRegion
    tail_radius: float

    @property
    def active(self) -> tuple[BandAtom, ...]:
        return tuple(a for a in self.atoms if not a.excluded)

    def atom(self, n: int) -> BandAtom:
        for a in self.atoms:
            if a.index == n:
                return a
        raise KeyError(n)

    def core(self, atom: BandAtom, xi: np.ndarray) -> np.ndarray:
        """ψ̂((ξ - ω_n)/a_n), without the |a_n|^{-1/2} normalisation."""
        return self.wavelet((xi - atom.center) / atom.scale)

    def reach(self, atom: BandAtom) -> tuple[float, float]:
        """Frequency interval outside which the band's filter is negligible."""
        s = self.wavelet.support
        r = self.tail_radius
        lo, hi = max(s.lo, -r), min(s.hi, r)
        ends = sorted((atom.center + atom.scale * lo, atom.center + atom.scale * hi))
        return ends[0], ends[1]

    def fingerprint(self) -> tuple:
        return tuple((a.index, a.center, a.scale, a.shift) for a in self.active)

    def scaled(self, c: complex) -> "EmpiricalWaveletSystem":
        """Same bands with ψ̂ replaced by c·ψ̂."""
        return EmpiricalWaveletSystem(
            self.partition, self.wavelet.scaled(c), self.atoms, self.gamma, self.tail_radius
        )

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.boundaries.to_dict(),
            "kind": self.partition.kind.value,
            "wavelet": self.wavelet.name,
            "gamma": self.gamma.to_dict(),
            "atoms": [a.to_dict() for a in self.atoms],
        }


def _parse_shift(value) -> tuple[float, Fraction | None]:
    if isinstance(value, Fraction):
        return float(value), value
    if isinstance(value, str):
        frac = Fraction(value)
        return float(frac), frac
    if isinstance(value, (list, tuple)) and len(value) == 2:
        frac = Fraction(int(value[0]), int(value[1]))
        return float(frac), frac
    return float(value), None


def _per_band(spec, partition: Partition, what: str) -> dict:
    if spec is None:
        return {}
    if isinstance(spec, Mapping):
        return {int(k): v for k, v in spec.items()}
    spec = list(spec)
    if len(spec) != len(partition.supports):
        raise ValidationError(
            f"{what}: expected {len(partition.supports)} entries (one per support), got {len(spec)}"
        )
    return {s.index: v for s, v in zip(partition.supports, spec) if v is not None}


def tail_radius(wavelet: MotherWavelet, mass: float = TAIL_MASS) -> float:
    """Radius beyond which ψ̂ carries less than ``mass``·‖ψ̂‖²."""
    s = wavelet.support
    if s.is_compact:
        return max(abs(s.lo), abs(s.hi))
    return essential_support(wavelet, mass).hi


def build_system(
    partition: Partition,
    wavelet: MotherWavelet,
    shifts: ShiftSpec = "reciprocal",
    *,
    overlap: float | None = None,
    margin: float | None = None,
    scales: Sequence | Mapping | None = None,
) -> EmpiricalWaveletSystem:
    """Assemble (ω_n, a_n, b_n) for every support of ``partition``.

    Compact ψ̂: a_n = overlap·|Ω_n|/|S| and ray bands are excluded.
    Otherwise a_n = |Ω_n|/|E| on compact bands and the ray rule on rays.
    ``shifts="reciprocal"`` gives b_n = 1/|S_n| (compact ψ̂) or
    b_n = 1/(|a_n|(|E| + 2·margin)) with margin defaulting to |E|/2.
    ``scales`` overrides a_n per band (mainly for diagnostics).
    """
    if partition.centers is None:
        partition = compute_centers(partition)
    compact = wavelet.support.is_compact
    overlap = wavelet.default_overlap if overlap is None else overlap
    ess = None if compact else wavelet.essential_or_default()
    if ess is not None and margin is None:
        margin = ess.width / 2
    forced_scales = _per_band(scales, partition, "scales")
    forced_shifts = {} if isinstance(shifts, str) else _per_band(shifts, partition, "shifts")
    if isinstance(shifts, str) and shifts != "reciprocal":
        raise ValidationError(f"unknown shift rule {shifts!r}")

    sups = partition.supports
    atoms = []
    for i, (sup, center) in enumerate(zip(sups, partition.centers)):
        try:
            if sup.is_compact:
                if compact:
                    a = scale_factor_compact(sup.length, wavelet, overlap)
                else:
                    a = scale_factor_essential(sup.length, ess.width)
            elif sup.is_left_ray:
                a = scale_factor_ray("left", center, sup.hi, wavelet, ess.width if ess else 0.0)
            else:
                a = scale_factor_ray("right", center, sup.lo, wavelet, ess.width if ess else 0.0)
        except CompactSupportRayUnsupported:
            atoms.append(BandAtom(sup.index, center, None, None, excluded=True))
            continue
        a = float(forced_scales.get(sup.index, a))

        if sup.index in forced_shifts:
            b, exact = _parse_shift(forced_shifts[sup.index])
        elif compact:
            b, exact = 1.0 / (abs(a) * wavelet.support.length), None
        else:
            b, exact = 1.0 / (abs(a) * (ess.width + 2 * margin)), None
        atoms.append(BandAtom(sup.index, center, a, b, shift_exact=exact))

    if all(a.excluded for a in atoms):
        raise EmptySystem("every band was excluded")
    return EmpiricalWaveletSystem(
        partition, wavelet, tuple(atoms), gamma_region(partition), tail_radius(wavelet)
    )


def filter_spectrum(system: EmpiricalWaveletSystem, n: int, xi: npt.ArrayLike) -> np.ndarray:
    """ψ̂_n(ξ) = |a_n|^{-1/2} ψ̂((ξ - ω_n)/a_n) sampled at ``xi``."""
    atom = system.atom(n)
    if atom.excluded:
        raise ExcludedBand(f"band {n} is excluded from the system")
    xi = np.asarray(xi, dtype=float)
    return system.core(atom, xi) / math.sqrt(abs(atom.scale))

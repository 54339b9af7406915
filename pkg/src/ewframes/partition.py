"""Fourier-line partitions: boundary sets, supports, centers and Γ regions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.signal import find_peaks

from .errors import (
    MissingZero,
    NonMonotoneBoundaries,
    NotEnoughExtrema,
    RayWithoutNeighbor,
    TooFewBoundaries,
    ValidationError,
)

STANDARD = "standard"
STARRED = "starred"


class PartitionKind(str, enum.Enum):
    NO_RAYS = "no_rays"
    LEFT_RAY = "left_ray"
    RIGHT_RAY = "right_ray"
    BOTH_RAYS = "both_rays"

    @property
    def has_rays(self) -> bool:
        return self is not PartitionKind.NO_RAYS


class GammaLabel(str, enum.Enum):
    FULL = "full"
    LRAY = "lray"
    RRAY = "rray"
    C = "c"


@dataclass(frozen=True)
class BoundarySet:
    """Finite boundary points plus flags for the ±∞ end points.

    Infinite end points are never stored as numbers; ``left_infinite`` and
    ``right_infinite`` mark ν_{n_m} = -∞ and ν_{n_M} = +∞.
    """

    points: tuple[float, ...]
    variant: str = STANDARD
    left_infinite: bool = False
    right_infinite: bool = False

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.variant not in (STANDARD, STARRED):
            raise ValidationError(f"unknown boundary variant {self.variant!r}")
        if any(not math.isfinite(p) for p in pts):
            raise NonMonotoneBoundaries(
                "boundary points must be finite; use the infinity flags for rays"
            )
        if len(pts) < 2:
            raise TooFewBoundaries(f"need at least 2 finite boundaries, got {len(pts)}")
        for lo, hi in zip(pts, pts[1:]):
            if not lo < hi:
                raise NonMonotoneBoundaries(
                    f"boundaries must be strictly increasing ({lo!r} >= {hi!r})"
                )
        zeros = sum(1 for p in pts if p == 0.0)
        if self.variant == STANDARD and zeros != 1:
            raise MissingZero("standard boundary set must contain ν_0 = 0")
        if self.variant == STARRED:
            if zeros:
                raise ValidationError("starred boundary set must not contain 0")
            if pts[0] > 0 or pts[-1] < 0:
                raise ValidationError(
                    "starred boundary set needs at least one negative and one positive point"
                )

    @classmethod
    def from_points(cls, values: Sequence[float], variant: str = STANDARD) -> "BoundarySet":
        """Build from a sequence that may start with -inf and/or end with +inf."""
        vals = [float(v) for v in values]
        left = bool(vals) and vals[0] == -math.inf
        right = bool(vals) and vals[-1] == math.inf
        finite = vals[int(left): len(vals) - int(right)]
        return cls(tuple(finite), variant, left, right)

    @property
    def index_offset(self) -> int:
        """Index n of the first finite point."""
        if self.variant == STANDARD:
            return -self.points.index(0.0)
        return -sum(1 for p in self.points if p < 0)

    def indexed(self) -> list[tuple[int, float]]:
        """(n, ν_n) pairs including the infinite end points."""
        out = []
        n = self.index_offset
        for p in self.points:
            if self.variant == STARRED and n == 0:
                n = 1
            out.append((n, p))
            n += 1
        if self.left_infinite:
            first = out[0][0] - 1
            if self.variant == STARRED and first == 0:
                first = -1
            out.insert(0, (first, -math.inf))
        if self.right_infinite:
            last = out[-1][0] + 1
            if self.variant == STARRED and last == 0:
                last = 1
            out.append((last, math.inf))
        return out

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "points": list(self.points),
            "leftInfinite": self.left_infinite,
            "rightInfinite": self.right_infinite,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundarySet":
        try:
            raw = [float(p) for p in data["points"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid partition config: {exc}") from None
        left = bool(data.get("leftInfinite", False))
        right = bool(data.get("rightInfinite", False))
        if raw and raw[0] == -math.inf:
            raw, left = raw[1:], True
        if raw and raw[-1] == math.inf:
            raw, right = raw[:-1], True
        return cls(tuple(raw), data.get("variant", STANDARD), left, right)


@dataclass(frozen=True)
class Support:
    """One Fourier support Ω_n = [lo, hi]; rays carry an infinite end."""

    index: int
    lo: float
    hi: float

    @property
    def is_left_ray(self) -> bool:
        return self.lo == -math.inf

    @property
    def is_right_ray(self) -> bool:
        return self.hi == math.inf

    @property
    def is_compact(self) -> bool:
        return not (self.is_left_ray or self.is_right_ray)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __contains__(self, xi: float) -> bool:
        return self.lo <= xi <= self.hi


@dataclass(frozen=True)
class Partition:
    boundaries: BoundarySet
    supports: tuple[Support, ...]
    kind: PartitionKind
    centers: tuple[float, ...] | None = None

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(s.length for s in self.supports)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.supports)

    def support(self, n: int) -> Support:
        for s in self.supports:
            if s.index == n:
                return s
        raise KeyError(n)

    def center(self, n: int) -> float:
        if self.centers is None:
            raise ValidationError("centers not computed; call compute_centers first")
        return self.centers[self.indices.index(n)]

    def boundary_points(self) -> tuple[float, ...]:
        """Finite end points of all supports, in increasing order."""
        pts: list[float] = []
        for s in self.supports:
            for p in (s.lo, s.hi):
                if math.isfinite(p) and (not pts or p > pts[-1]):
                    pts.append(p)
        return tuple(pts)

    @property
    def finite_span(self) -> tuple[float, float]:
        pts = self.boundaries.points
        return pts[0], pts[-1]


def build_partition(boundaries: BoundarySet) -> Partition:
    """Turn a boundary set into its list of Fourier supports."""
    pts = boundaries.indexed()
    supports = []
    i = 0
    while i < len(pts) - 1:
        n, lo = pts[i]
        _, hi = pts[i + 1]
        if boundaries.variant == STARRED and n == -1:
            # Ω_{-1} = [ν_{-1}, ν_1] bridges the missing ν_0
            supports.append(Support(-1, lo, hi))
        else:
            supports.append(Support(n, lo, hi))
        i += 1
    if boundaries.left_infinite and boundaries.right_infinite:
        kind = PartitionKind.BOTH_RAYS
    elif boundaries.left_infinite:
        kind = PartitionKind.LEFT_RAY
    elif boundaries.right_infinite:
        kind = PartitionKind.RIGHT_RAY
    else:
        kind = PartitionKind.NO_RAYS
    return Partition(boundaries, tuple(supports), kind)


def compute_centers(partition: Partition) -> Partition:
    """Fill in ω_n; rays get the center mirrored from their compact neighbour."""
    sup = partition.supports
    centers = []
    for i, s in enumerate(sup):
        if s.is_compact:
            centers.append((s.lo + s.hi) / 2)
        elif s.is_left_ray:
            nb = sup[i + 1] if i + 1 < len(sup) else None
            if nb is None or not nb.is_compact:
                raise RayWithoutNeighbor(f"left ray Ω_{s.index} has no compact neighbour")
            centers.append(s.hi - nb.length / 2)
        else:
            nb = sup[i - 1] if i > 0 else None
            if nb is None or not nb.is_compact:
                raise RayWithoutNeighbor(f"right ray Ω_{s.index} has no compact neighbour")
            centers.append(s.lo + nb.length / 2)
    return replace(partition, centers=tuple(centers))


@dataclass(frozen=True)
class GammaRegion:
    """Part of the frequency line a system targets.

    ``intervals`` are the compact supports that remain once ray supports are
    dropped. For ``FULL`` they simply record the finite window of the partition.
    """

    label: GammaLabel
    intervals: tuple[tuple[float, float], ...] = field(default=())

    @property
    def bounds(self) -> tuple[float, float]:
        return self.intervals[0][0], self.intervals[-1][1]

    @property
    def is_full(self) -> bool:
        return self.label is GammaLabel.FULL

    def mask(self, xi: npt.ArrayLike) -> np.ndarray:
        """Half-open membership test ξ ∈ [lo, hi); all-true for the full line."""
        xi = np.asarray(xi, dtype=float)
        if self.is_full:
            return np.ones(xi.shape, dtype=bool)
        lo, hi = self.bounds
        return (xi >= lo) & (xi < hi)

    def to_dict(self) -> dict:
        return {"label": self.label.value, "intervals": [list(iv) for iv in self.intervals]}


def gamma_region(partition: Partition) -> GammaRegion:
    compact = tuple((s.lo, s.hi) for s in partition.supports if s.is_compact)
    label = {
        PartitionKind.NO_RAYS: GammaLabel.FULL,
        PartitionKind.LEFT_RAY: GammaLabel.LRAY,
        PartitionKind.RIGHT_RAY: GammaLabel.RRAY,
        PartitionKind.BOTH_RAYS: GammaLabel.C,
    }[partition.kind]
    return GammaRegion(label, compact)


def detect_boundaries(
    magnitudes: npt.ArrayLike,
    band_count: int,
    frequencies: npt.ArrayLike | None = None,
) -> BoundarySet:
    """Place boundaries at the lowest minima between the largest spectral peaks.

    ``magnitudes`` is a nonnegative half spectrum on a uniform grid of
    nonnegative ``frequencies`` (default: ``linspace(0, 1, len)``). The
    ``band_count`` tallest local maxima are kept; one boundary goes at the
    lowest bin between each consecutive pair and one at the lowest bin to the
    right of the last peak. The result is mirrored to negative frequencies and
    closed with ν_0 = 0 and two rays. Ties resolve toward lower frequency.
    """
    mag = np.asarray(magnitudes, dtype=float)
    if band_count < 1:
        raise ValidationError("band_count must be positive")
    if mag.ndim != 1 or mag.size < 2 * band_count + 1:
        raise ValidationError(
            f"spectrum needs at least {2 * band_count + 1} samples, got {mag.size}"
        )
    if np.any(mag < 0) or not np.all(np.isfinite(mag)):
        raise ValidationError("magnitudes must be finite and nonnegative")
    if frequencies is None:
        freqs = np.linspace(0.0, 1.0, mag.size)
    else:
        freqs = np.asarray(frequencies, dtype=float)
        if freqs.shape != mag.shape:
            raise ValidationError("frequencies and magnitudes differ in length")
        if freqs[0] < 0 or np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequencies must be nonnegative and increasing")

    peaks, _ = find_peaks(mag)
    if peaks.size < band_count:
        raise NotEnoughExtrema(f"found {peaks.size} local maxima, need {band_count}")
    # tallest first; equal heights keep the lower frequency
    order = sorted(peaks.tolist(), key=lambda i: (-mag[i], i))
    kept = sorted(order[:band_count])

    cuts = []
    for left, right in zip(kept, kept[1:]):
        cuts.append(left + 1 + int(np.argmin(mag[left + 1: right])))
    last = kept[-1]
    cuts.append(last + 1 + int(np.argmin(mag[last + 1:])))

    positive = [float(freqs[i]) for i in cuts]
    if positive[0] <= 0:
        raise NotEnoughExtrema("detected boundary at zero frequency")
    pts = [-p for p in reversed(positive)] + [0.0] + positive
    return BoundarySet(tuple(pts), STANDARD, True, True)

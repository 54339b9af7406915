"""File formats: partition/wavelet JSON, spectra and signals, coefficients."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import FormatError, SystemMismatch, ValidationError
from .partition import BoundarySet
from .system import EmpiricalWaveletSystem
from .transform import CoefficientSet, SampledSignal
from .wavelets import (
    DEFAULT_DELTA,
    MotherWavelet,
    SupportDescriptor,
    from_samples,
    gaussian,
    meyer,
    shannon,
)


def load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def dumps(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def dump_json(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


def _rows(path: str | Path, ncols: int) -> list[tuple[int, list[float]]]:
    """Numeric CSV rows as (line number, values); a leading header is skipped."""
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if lineno == 1 and any(ch.isalpha() for ch in row[0]):
                    continue
                raise FormatError(f"{path}: line {lineno}: non-numeric value in {row!r}") from None
            if len(vals) != ncols:
                raise FormatError(
                    f"{path}: line {lineno}: expected {ncols} columns, got {len(vals)}"
                )
            out.append((lineno, vals))
    return out


# partitions and wavelets


def load_boundaries(path: str | Path) -> BoundarySet:
    return BoundarySet.from_dict(load_json(path))


def wavelet_from_config(cfg: dict, base_dir: str | Path = ".") -> MotherWavelet:
    """Build a wavelet from {"kind", "params", "delta"}."""
    kind = cfg.get("kind")
    params = dict(cfg.get("params", {}))
    delta = float(cfg.get("delta", DEFAULT_DELTA))
    if kind == "shannon":
        w = shannon()
    elif kind == "meyer":
        w = meyer(float(params.get("tau", 0.1)))
    elif kind == "gaussian":
        w = gaussian()
    elif kind == "custom":
        if "path" not in params:
            raise ValidationError("custom wavelet needs params.path to a (ξ, Re, Im) CSV")
        rows = _rows(Path(base_dir) / params["path"], 3)
        if not rows:
            raise ValidationError("custom wavelet CSV is empty")
        arr = np.array([v for _, v in rows])
        support = SupportDescriptor.from_dict(params["support"]) if "support" in params else None
        w = from_samples(arr[:, 0], arr[:, 1] + 1j * arr[:, 2], support)
    else:
        raise ValidationError(f"unknown wavelet kind {kind!r}")
    if "amplitude" in params:
        w = w.scaled(float(params["amplitude"]))
    return w.with_essential(delta)


def load_wavelet(path: str | Path) -> tuple[MotherWavelet, dict]:
    """Wavelet plus system options (``overlap``, ``margin``) found in the file."""
    cfg = load_json(path)
    opts = {k: cfg[k] for k in ("overlap", "margin") if k in cfg}
    return wavelet_from_config(cfg, Path(path).parent), opts


# spectra and signals


def read_spectrum_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    rows = _rows(path, 2)
    if not rows:
        raise ValidationError(f"{path}: no spectrum rows")
    arr = np.array([v for _, v in rows])
    return arr[:, 0], arr[:, 1]


def read_signal(path: str | Path) -> SampledSignal:
    """CSV (t, Re, Im), or raw little-endian float64 pairs with a .json sidecar."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        rows = _rows(path, 3)
        if len(rows) < 2:
            raise ValidationError(f"{path}: signal needs at least 2 samples")
        arr = np.array([v for _, v in rows])
        steps = np.diff(arr[:, 0])
        dt = float(steps.mean())
        if not dt > 0 or np.max(np.abs(steps - dt)) > 1e-9 * dt:
            raise FormatError(f"{path}: time column is not uniformly increasing")
        return SampledSignal(arr[:, 1] + 1j * arr[:, 2], dt)
    meta = load_json(path.with_suffix(".json"))
    raw = np.fromfile(path, dtype="<f8")
    n = int(meta["length"])
    if raw.size != 2 * n:
        raise FormatError(f"{path}: expected {2 * n} float64 values, found {raw.size}")
    if n < 2:
        raise ValidationError(f"{path}: signal needs at least 2 samples")
    return SampledSignal(raw[0::2] + 1j * raw[1::2], float(meta["sampleInterval"]))


def write_signal(signal: SampledSignal, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im"])
            for t, x in zip(signal.times, signal.samples):
                w.writerow([repr(float(t)), repr(float(x.real)), repr(float(x.imag))])
        return
    inter = np.empty(2 * signal.n, dtype="<f8")
    inter[0::2], inter[1::2] = signal.samples.real, signal.samples.imag
    inter.tofile(path)
    dump_json({"sampleInterval": signal.dt, "length": signal.n}, path.with_suffix(".json"))


# coefficients


def coefficients_to_dict(coeffs: CoefficientSet) -> dict:
    bands = []
    for n in sorted(coeffs.bands):
        c = coeffs.bands[n]
        bands.append({
            "n": n,
            "bn": coeffs.steps[n] * coeffs.dt,
            "step": coeffs.steps[n],
            "coeffs": [[float(z.real), float(z.imag)] for z in c],
        })
    return {"mode": coeffs.mode, "sampleInterval": coeffs.dt, "length": coeffs.length, "bands": bands}


def write_coefficients(coeffs: CoefficientSet, path: str | Path) -> None:
    """JSON envelope, or one CSV per band if ``path`` is a directory name without suffix."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        dump_json(coefficients_to_dict(coeffs), path)
        return
    path.mkdir(parents=True, exist_ok=True)
    for n, c in sorted(coeffs.bands.items()):
        with open(path / f"band_{n}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "b", "re", "im"])
            for k, (pos, z) in enumerate(zip(coeffs.positions(n), c)):
                w.writerow([k, repr(float(pos * coeffs.dt)), repr(float(z.real)), repr(float(z.imag))])


def coefficients_from_dict(data: dict, system: EmpiricalWaveletSystem) -> CoefficientSet:
    """Rebuild a coefficient set and bind it to ``system`` (shift steps must agree)."""
    try:
        dt = float(data["sampleInterval"])
        length = int(data["length"])
        mode = data["mode"]
        entries = data["bands"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid coefficient envelope: {exc}") from None
    bands, steps = {}, {}
    active = {a.index: a for a in system.active}
    for entry in entries:
        n = int(entry["n"])
        if n not in active:
            raise SystemMismatch(f"band {n} is not an active band of the system")
        step = int(entry.get("step", round(float(entry["bn"]) / dt)))
        if mode == "dewt" and not math.isclose(step * dt, active[n].shift, rel_tol=1e-9):
            raise SystemMismatch(f"band {n}: stored b_n differs from the system's")
        arr = np.asarray(entry["coeffs"], dtype=float).reshape(-1, 2)
        bands[n] = arr[:, 0] + 1j * arr[:, 1]
        steps[n] = step
    if set(bands) != set(active):
        raise SystemMismatch("coefficient bands do not match the system's active bands")
    return CoefficientSet(bands, mode, steps, length, dt, system.fingerprint())

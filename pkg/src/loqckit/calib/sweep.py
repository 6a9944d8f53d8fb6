"""Wavelength sweeps and their file formats.

A sweep CSV has the header ``wavelength_nm,value`` and holds one
(device, port) trace. Manifests are JSON files binding sweep files to roles.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from loqckit import units
from loqckit.errors import DomainError


@dataclass(frozen=True, eq=False)
class SweepDataset:
    """Transmission of one (device, port) versus wavelength (nm)."""

    wavelength: np.ndarray
    value: np.ndarray
    device: str = ""
    port: str = ""
    scale: str = "linear"

    def __post_init__(self):
        lam = np.asarray(self.wavelength, dtype=float)
        val = np.asarray(self.value, dtype=float)
        object.__setattr__(self, "wavelength", lam)
        object.__setattr__(self, "value", val)
        if lam.ndim != 1 or lam.shape != val.shape:
            raise DomainError("wavelength and value must be 1-D arrays of equal length")
        if lam.size and np.any(np.diff(lam) <= 0):
            raise DomainError("wavelengths must be strictly increasing")
        if self.scale not in ("linear", "dB"):
            raise DomainError(f"scale must be 'linear' or 'dB', got {self.scale!r}")
        if self.scale == "linear" and np.any(val < 0):
            raise DomainError("linear transmissions must be non-negative")
        if not np.all(np.isfinite(val)):
            raise DomainError("transmission values must be finite")

    def __len__(self):
        return self.wavelength.size

    def linear(self) -> np.ndarray:
        return self.value if self.scale == "linear" else units.from_db(self.value)

    def as_linear(self) -> "SweepDataset":
        if self.scale == "linear":
            return self
        return SweepDataset(self.wavelength, self.linear(), self.device, self.port)

    def window(self, lo: float, hi: float) -> "SweepDataset":
        keep = (self.wavelength >= lo) & (self.wavelength <= hi)
        return SweepDataset(self.wavelength[keep], self.value[keep],
                            self.device, self.port, self.scale)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["wavelength_nm", "value"])
        for lam, v in zip(self.wavelength, self.value):
            w.writerow([repr(float(lam)), repr(float(v))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path, device: str = "", port: str = "", scale: str = "linear"):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or "wavelength_nm" not in rows[0] or "value" not in rows[0]:
            raise DomainError(f"{path}: expected header 'wavelength_nm,value'")
        lam = [float(r["wavelength_nm"]) for r in rows]
        val = [float(r["value"]) for r in rows]
        return cls(np.array(lam), np.array(val), device or Path(path).stem, port, scale)


def boxcar_average(ds: SweepDataset, center: float, width: float = 2.0) -> float:
    """Mean linear transmission within ``center +/- width/2``."""
    lam = ds.wavelength
    keep = np.abs(lam - center) <= width / 2.0
    if not np.any(keep):
        raise DomainError(f"no samples within {width} nm of {center} nm")
    return float(np.mean(ds.linear()[keep]))


def read_manifest(path) -> dict:
    """Load a JSON manifest; relative file names resolve against its folder."""
    path = Path(path)
    data = json.loads(path.read_text())
    data["_base"] = str(path.parent)
    return data


def resolve(manifest: dict, name: str) -> str:
    base = manifest.get("_base", ".")
    return name if os.path.isabs(name) else os.path.join(base, name)

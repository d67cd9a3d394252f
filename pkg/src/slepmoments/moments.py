"""Slepian-based moments of polar images, rotation invariants, and reconstruction.

A moment S[m][n] is the projection of the conjugated image onto
psi_m(r) * exp(-i n theta) with area weight r dr dtheta, evaluated on the
uniform polar grid by midpoint quadrature in r and a length-T FFT in theta.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .dpss import DpssBasis, radial_basis
from .errors import AliasingError, ParameterError
from .imaging import PolarImage, RasterImage, to_polar

__all__ = [
    "MomentSet",
    "InvariantVector",
    "compute_moments",
    "invariants",
    "reconstruct",
    "feature_vector",
    "moments_to_json",
    "moments_from_json",
    "invariants_to_csv",
]

QUADRATURE_NAME = "midpoint-radial-x-fft-angular"


@dataclass(frozen=True)
class MomentSet:
    """Complex moments S[m][n] for m in [0, M) and n in [-L, L].

    ``values`` has shape (M, 2L+1); column index L+n holds angular order n.
    """

    max_radial: int
    max_angular: int
    values: np.ndarray = field(repr=False)
    grid: tuple[int, int]
    basis_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        expected = (self.max_radial, 2 * self.max_angular + 1)
        if v.shape != expected:
            raise ParameterError(f"moment array shape {v.shape}, expected {expected}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("moment values must be finite")
        object.__setattr__(self, "values", v)

    def value(self, m: int, n: int) -> complex:
        if not (0 <= m < self.max_radial and -self.max_angular <= n <= self.max_angular):
            raise IndexError(f"moment order ({m}, {n}) outside stored range")
        return complex(self.values[m, self.max_angular + n])


@dataclass(frozen=True)
class InvariantVector:
    """Rotation invariants |S[m][n]| for n >= 0, flattened m-major.

    Length is M*(L+1); entry index m*(L+1)+n holds phi_{m,n}.
    """

    max_radial: int
    max_angular: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (self.max_radial * (self.max_angular + 1),):
            raise ParameterError(
                f"invariant vector length {e.shape}, expected "
                f"{self.max_radial * (self.max_angular + 1)}"
            )
        object.__setattr__(self, "entries", e)

    def value(self, m: int, n: int) -> float:
        if not (0 <= m < self.max_radial and 0 <= n <= self.max_angular):
            raise IndexError(f"invariant order ({m}, {n}) outside stored range")
        return float(self.entries[m * (self.max_angular + 1) + n])


def compute_moments(
    img: PolarImage, basis: DpssBasis, max_radial: int, max_angular: int
) -> MomentSet:
    """Project the image onto the moment kernels via one FFT per radial ring.

    S[m][n] = sum_i psi_m(r_i) r_i dr * (sum_j exp(-i n theta_j) conj(f) dtheta)
    with dr = 1/R and dtheta = 2pi/T; identical to the direct double sum.
    """
    if max_radial < 1:
        raise ParameterError(f"max_radial must be >= 1, got {max_radial}")
    if max_angular < 0:
        raise ParameterError(f"max_angular must be >= 0, got {max_angular}")
    if max_radial > basis.params.n_seq:
        raise ParameterError(
            f"max_radial {max_radial} exceeds basis n_seq {basis.params.n_seq}"
        )
    n_r, n_t = img.n_radial, img.n_angular
    if 2 * max_angular + 1 > n_t:
        raise AliasingError(
            f"angular orders [-{max_angular}, {max_angular}] need at least "
            f"{2 * max_angular + 1} angular samples, grid has {n_t}"
        )
    r = img.radii
    psi = radial_basis(basis, r)[:max_radial]
    # DFT of conj(f) along theta gives the inner sum for every n at once.
    spectrum = np.fft.fft(np.conj(img.samples), axis=1)
    cols = spectrum[:, np.arange(-max_angular, max_angular + 1) % n_t]
    cols = cols * (2.0 * np.pi / n_t)
    weights = r / n_r
    values = (psi * weights) @ cols
    return MomentSet(
        max_radial=max_radial,
        max_angular=max_angular,
        values=values,
        grid=(n_r, n_t),
        basis_id=basis.basis_id,
    )


def invariants(ms: MomentSet) -> InvariantVector:
    """Moduli |S[m][n]| for n >= 0 (negative n is redundant for real images)."""
    nonneg = ms.values[:, ms.max_angular :]
    return InvariantVector(
        max_radial=ms.max_radial,
        max_angular=ms.max_angular,
        entries=np.abs(nonneg).ravel(),
    )


def reconstruct(ms: MomentSet, basis: DpssBasis, grid: tuple[int, int]) -> PolarImage:
    """Evaluate the truncated series sum_{m,n} S[m][n] psi_m(r) exp(-i n theta).

    All stored orders contribute, negative n included. Returns the real part;
    the largest absolute imaginary residual is reported in the image metadata.
    """
    n_r, n_t = grid
    if n_r < ms.grid[0] or n_t < ms.grid[1]:
        raise ParameterError(
            f"target grid {grid} must match or refine the moment grid {ms.grid}"
        )
    r = (np.arange(n_r) + 0.5) / n_r
    psi = radial_basis(basis, r)[: ms.max_radial]
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    ns = np.arange(-ms.max_angular, ms.max_angular + 1)
    angular = np.exp(-1j * np.outer(ns, theta))
    series = psi.T @ ms.values @ angular
    residual = float(np.abs(series.imag).max()) if series.size else 0.0
    return PolarImage(
        n_radial=n_r,
        n_angular=n_t,
        samples=series.real,
        meta={"imag_residual": residual},
    )


def feature_vector(
    img: RasterImage,
    basis: DpssBasis,
    max_radial: int = 10,
    max_angular: int = 9,
    grid: tuple[int, int] = (64, 128),
) -> InvariantVector:
    """Polar resampling, moments, and invariants in one step.

    Defaults give the 100-element vector (10 radial orders, angular orders 0..9).
    """
    if basis.params.n_seq < max_radial:
        raise ParameterError(
            f"basis holds {basis.params.n_seq} sequences, need {max_radial}"
        )
    polar = to_polar(img, grid[0], grid[1])
    return invariants(compute_moments(polar, basis, max_radial, max_angular))


# --- serialization -----------------------------------------------------------


def moments_to_json(ms: MomentSet) -> str:
    """Dump as {"metadata": ..., "moments": [{"m","n","re","im"}, ...]}."""
    entries = []
    for m in range(ms.max_radial):
        for n in range(-ms.max_angular, ms.max_angular + 1):
            v = ms.values[m, ms.max_angular + n]
            entries.append({"m": m, "n": n, "re": float(v.real), "im": float(v.imag)})
    doc = {
        "metadata": {
            "grid": list(ms.grid),
            "basis_id": ms.basis_id,
            "quadrature": QUADRATURE_NAME,
        },
        "moments": entries,
    }
    return json.dumps(doc, indent=1)


def moments_from_json(text: str) -> MomentSet:
    doc = json.loads(text)
    meta = doc["metadata"]
    entries = doc["moments"]
    max_radial = max(e["m"] for e in entries) + 1
    max_angular = max(e["n"] for e in entries)
    values = np.zeros((max_radial, 2 * max_angular + 1), dtype=complex)
    for e in entries:
        values[e["m"], max_angular + e["n"]] = e["re"] + 1j * e["im"]
    return MomentSet(
        max_radial=max_radial,
        max_angular=max_angular,
        values=values,
        grid=tuple(meta["grid"]),
        basis_id=meta["basis_id"],
    )


def invariants_to_csv(vec: InvariantVector) -> str:
    """Single-row CSV with header phi_m_n in flattening order."""
    header = [
        f"phi_{m}_{n}"
        for m in range(vec.max_radial)
        for n in range(vec.max_angular + 1)
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerow([repr(float(v)) for v in vec.entries])
    return buf.getvalue()

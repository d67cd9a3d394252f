"""Discrete prolate spheroidal sequences (DPSS) and the radial basis built from them.

The sequences are computed as eigenvectors of the symmetric tridiagonal matrix
that commutes with the bandlimiting sinc kernel; this is the numerically stable
route, since the sinc kernel's own eigenvalues cluster exponentially near 0 and 1.
Concentration eigenvalues are then recovered as Rayleigh quotients against the
dense sinc kernel.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal, matmul_toeplitz

from .errors import DomainError, ParameterError

__all__ = [
    "DpssParams",
    "DpssBasis",
    "SpectrumSample",
    "sinc_kernel",
    "compute_dpss",
    "dpss_spectrum",
    "concentration_ratio",
    "radial_basis",
]


@dataclass(frozen=True)
class DpssParams:
    """Sequence length N, half bandwidth W in (0, 0.5), and sequence count K <= N."""

    n_len: int
    half_bandwidth: float
    n_seq: int

    def __post_init__(self):
        if self.n_len < 1:
            raise ParameterError(f"n_len must be a positive integer, got {self.n_len}")
        if self.n_len > 4096:
            raise ParameterError(f"n_len is capped at 4096, got {self.n_len}")
        if not (0.0 < self.half_bandwidth < 0.5):
            raise ParameterError(
                f"half_bandwidth must lie in (0, 0.5), got {self.half_bandwidth}"
            )
        if not (1 <= self.n_seq <= self.n_len):
            raise ParameterError(
                f"n_seq must satisfy 1 <= n_seq <= n_len, got {self.n_seq}"
            )


@dataclass(frozen=True, eq=False)
class DpssBasis:
    """K orthonormal sequences of length N with concentration eigenvalues in (0, 1).

    Rows of ``sequences`` are sign-fixed so the first nonzero entry is positive,
    and ``eigenvalues`` are strictly decreasing. Identity-based equality keeps
    the instance hashable for caching.
    """

    params: DpssParams
    sequences: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray

    @property
    def basis_id(self) -> str:
        p = self.params
        return f"dpss-n{p.n_len}-w{p.half_bandwidth:g}-k{p.n_seq}"


@dataclass(frozen=True)
class SpectrumSample:
    """Value of the sequence spectrum at one frequency u in [-0.5, 0.5]."""

    u: float
    value: complex


def sinc_kernel(n_len: int, half_bandwidth: float) -> np.ndarray:
    """Dense N x N bandlimiting kernel sin(2piW(n-m))/(pi(n-m)), diagonal 2W."""
    if n_len < 1:
        raise ParameterError(f"n_len must be a positive integer, got {n_len}")
    if not (0.0 < half_bandwidth < 0.5):
        raise ParameterError(
            f"half_bandwidth must lie in (0, 0.5), got {half_bandwidth}"
        )
    col = _kernel_column(n_len, half_bandwidth)
    idx = np.abs(np.arange(n_len)[:, None] - np.arange(n_len)[None, :])
    return col[idx]


def _kernel_column(n_len: int, half_bandwidth: float) -> np.ndarray:
    col = np.empty(n_len)
    col[0] = 2.0 * half_bandwidth
    if n_len > 1:
        m = np.arange(1, n_len)
        col[1:] = np.sin(2.0 * np.pi * half_bandwidth * m) / (np.pi * m)
    return col


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each row so its first nonzero entry (relative tolerance) is positive."""
    out = vectors.copy()
    for k, v in enumerate(out):
        nz = np.nonzero(np.abs(v) > 1e-13 * np.abs(v).max())[0]
        if v[nz[0]] < 0:
            out[k] = -v
    return out


def _enforce_decreasing(lam: np.ndarray) -> np.ndarray:
    """Clamp Rayleigh quotients into (0, 1) and break float ties downward.

    For large N*W the true eigenvalues differ by less than one ulp of 1.0, so the
    quotients collapse onto 1.0; the concentration ORDER is still certain (it is
    the order delivered by the commuting tridiagonal solver), so ties are resolved
    by nudging each value at most a few ulps below its predecessor.
    """
    out = np.minimum(lam, np.nextafter(1.0, 0.0))
    tiny = np.finfo(float).tiny
    out[0] = max(out[0], tiny)
    for k in range(1, len(out)):
        cap = np.nextafter(out[k - 1], -np.inf)
        out[k] = max(min(out[k], cap), tiny)
        if out[k] >= out[k - 1]:  # predecessor already at the positive floor
            out[k] = out[k - 1] / 2.0
    return out


def compute_dpss(params: DpssParams) -> DpssBasis:
    """Compute the first K sequences and their concentration eigenvalues.

    Eigenvectors come from the commuting symmetric tridiagonal matrix with
    diagonal ((N-1-2t)/2)^2 cos(2piW) and off-diagonal t(N-t)/2; eigenvalues are
    Rayleigh quotients v^T A v against the sinc kernel A, evaluated with an
    FFT-based Toeplitz product.
    """
    n, w, k = params.n_len, params.half_bandwidth, params.n_seq
    if n == 1:
        seqs = np.ones((1, 1))
    else:
        t = np.arange(n)
        diag = ((n - 1 - 2 * t) / 2.0) ** 2 * np.cos(2.0 * np.pi * w)
        off = np.arange(1, n) * np.arange(n - 1, 0, -1) / 2.0
        _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(n - k, n - 1))
        seqs = np.ascontiguousarray(vecs[:, ::-1].T)
        seqs /= np.linalg.norm(seqs, axis=1, keepdims=True)
    seqs = _fix_signs(seqs)

    col = _kernel_column(n, w)
    av = matmul_toeplitz((col, col), seqs.T)
    lam = np.einsum("kn,nk->k", seqs, av)
    lam = _enforce_decreasing(np.asarray(lam, dtype=float))
    return DpssBasis(params=params, sequences=seqs, eigenvalues=lam)


_PHASE_CACHE: "weakref.WeakKeyDictionary[DpssBasis, dict]" = weakref.WeakKeyDictionary()


def _phase_matrix(basis: DpssBasis, u: np.ndarray) -> np.ndarray:
    """exp(-i pi u (N-1-2m)), cached per basis and frequency grid."""
    per_basis = _PHASE_CACHE.setdefault(basis, {})
    key = u.tobytes()
    if key not in per_basis:
        n = basis.params.n_len
        freqs = n - 1 - 2 * np.arange(n)
        per_basis[key] = np.exp(-1j * np.pi * np.outer(u, freqs))
        if len(per_basis) > 8:  # bound the per-basis footprint
            per_basis.pop(next(iter(per_basis)))
    return per_basis[key]


def _spectrum_values(basis: DpssBasis, k: int, u: np.ndarray) -> np.ndarray:
    eps_k = 1.0 if k % 2 == 0 else 1.0j
    return eps_k * (_phase_matrix(basis, u) @ basis.sequences[k])


def dpss_spectrum(basis: DpssBasis, k: int, u_grid) -> list[SpectrumSample]:
    """Evaluate f_k(u) = eps_k * sum_m v_m exp(-i pi (N-1-2m) u) on a frequency grid.

    eps_k is 1 for even k and the imaginary unit for odd k, which keeps the
    inverse relation v_m = (1/eps_k) integral of f_k exp(+i pi (N-1-2m) u) du
    valid for every k.
    """
    if not (0 <= k < basis.params.n_seq):
        raise IndexError(f"sequence index {k} out of range [0, {basis.params.n_seq})")
    u = np.asarray(u_grid, dtype=float)
    vals = _spectrum_values(basis, k, u)
    return [SpectrumSample(u=float(ui), value=complex(vi)) for ui, vi in zip(u, vals)]


def concentration_ratio(basis: DpssBasis, k: int, quad_points: int) -> float:
    """Energy of f_k inside [-W, W] over its energy on [-1/2, 1/2], by quadrature.

    Composite Simpson on both intervals; the result reproduces the eigenvalue
    lambda_k up to quadrature error.
    """
    if not (0 <= k < basis.params.n_seq):
        raise IndexError(f"sequence index {k} out of range [0, {basis.params.n_seq})")
    if quad_points < 3:
        raise ParameterError(f"quad_points must be >= 3, got {quad_points}")
    npts = quad_points + (quad_points + 1) % 2  # odd point count
    w = basis.params.half_bandwidth
    u_in = np.linspace(-w, w, npts)
    u_all = np.linspace(-0.5, 0.5, npts)
    num = simpson(np.abs(_spectrum_values(basis, k, u_in)) ** 2, x=u_in)
    den = simpson(np.abs(_spectrum_values(basis, k, u_all)) ** 2, x=u_all)
    ratio = float(num / den)
    return min(max(ratio, np.finfo(float).tiny), np.nextafter(1.0, 0.0))


def _catmull_rom(samples: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Catmull-Rom interpolation of uniformly spaced samples, queried at x.

    x is in sample-index units; end tangents use linearly reflected ghost points.
    """
    n = samples.shape[0]
    if n == 1:
        return np.full(x.shape, samples[0])
    padded = np.empty(n + 2)
    padded[1:-1] = samples
    padded[0] = 2.0 * samples[0] - samples[1]
    padded[-1] = 2.0 * samples[-1] - samples[-2]
    i = np.clip(np.floor(x).astype(int), 0, n - 2)
    t = x - i
    p0, p1, p2, p3 = padded[i], padded[i + 1], padded[i + 2], padded[i + 3]
    return 0.5 * (
        2.0 * p1
        + (-p0 + p2) * t
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t**2
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t**3
    )


def radial_basis(basis: DpssBasis, r_grid) -> np.ndarray:
    """Resample every sequence onto radii in [0, 1]; returns a K x R matrix.

    The native sample m sits at radius m/(N-1) (index axis rescaled to the unit
    interval); off-node radii are filled by Catmull-Rom interpolation.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size and (r.min() < 0.0 or r.max() > 1.0):
        raise DomainError("radial grid values must lie in [0, 1]")
    x = r * (basis.params.n_len - 1)
    return np.vstack([_catmull_rom(v, x) for v in basis.sequences])

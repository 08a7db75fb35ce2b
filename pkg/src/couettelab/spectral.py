"""Gevrey norms, Littlewood-Paley blocks, paraproducts and spectral products.

Frequency magnitudes use the l1 length |k, eta| = |k| + |eta| and the
bracket <k, eta>^2 = 1 + |k, eta|^2 throughout, matching the notation
conventions of the analysis this package certifies.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from .grid import GridSpec, SpectralField

__all__ = [
    "gevrey_norm",
    "sobolev_norm",
    "smooth_cutoff",
    "annulus_cutoff",
    "dyadic_scales",
    "dyadic_project",
    "paraproduct_split",
    "convolve_fields",
    "convolve_direct",
    "product_fields",
    "apply_multiplier",
]


def gevrey_norm(f: SpectralField, lam: float, sigma: float, s: float) -> float:
    """Weighted norm (sum e^{2 lam |k,eta|^s} <k,eta>^{2 sigma} |fhat|^2 d_eta)^(1/2)."""
    if lam < 0 or sigma < 0:
        raise ValueError("lam and sigma must be nonnegative")
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    if not np.all(np.isfinite(f.coeffs)):
        raise ValueError("field has non-finite coefficients")
    g = f.grid
    weight = np.exp(2.0 * lam * g.abs_l1**s) * g.bracket_sq**sigma
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2) * g.d_eta))


def sobolev_norm(f: SpectralField, sigma: float) -> float:
    """H^sigma norm with the same l1 bracket convention."""
    g = f.grid
    weight = g.bracket_sq**sigma
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2) * g.d_eta))


# ---------------------------------------------------------------------------
# Littlewood-Paley apparatus
# ---------------------------------------------------------------------------

def _smoothstep(x: np.ndarray) -> np.ndarray:
    # cubic smoothstep, C^1 at both ends
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def smooth_cutoff(xi) -> np.ndarray:
    """Low cutoff chi: 1 on |xi| <= 1/2, 0 on |xi| >= 3/4, smooth in between."""
    xi = np.abs(np.asarray(xi, dtype=float))
    return 1.0 - _smoothstep((xi - 0.5) / 0.25)


def annulus_cutoff(xi, N: float = 1.0) -> np.ndarray:
    """phi_N(xi) = chi(xi / (2N)) - chi(xi / N), supported on [N/2, 3N/2]."""
    xi = np.asarray(xi, dtype=float)
    return smooth_cutoff(xi / (2.0 * N)) - smooth_cutoff(xi / N)


def dyadic_scales(grid: GridSpec) -> list[float]:
    """Dyadic scales whose blocks can be nonempty on the lattice.

    The leading entry 1/2 denotes the chi block; the annuli N >= 1 follow,
    up to the first N with N/2 beyond the largest lattice frequency.
    """
    xi_max = float(np.max(grid.abs_l1))
    scales = [0.5]
    N = 1.0
    while N / 2.0 <= xi_max:
        scales.append(N)
        N *= 2.0
    return scales


@lru_cache(maxsize=None)
def _block_multipliers(grid: GridSpec) -> dict[float, np.ndarray]:
    xi = grid.abs_l1
    out: dict[float, np.ndarray] = {}
    for N in dyadic_scales(grid):
        out[N] = smooth_cutoff(xi) if N == 0.5 else annulus_cutoff(xi, N)
    return out


def dyadic_project(f: SpectralField, N: float, selector: str = "block") -> SpectralField:
    """Project onto a dyadic block of |k| + |eta|.

    selector:
      "block"  -> f_N        (chi block when N == 1/2)
      "below"  -> f_{<N}     (chi block plus all annuli N' < N)
      "near"   -> f_{~N}     (blocks N' with N/8 <= N' <= 8N)
    """
    g = f.grid
    xi = g.abs_l1
    if selector == "block":
        mult = smooth_cutoff(xi) if N == 0.5 else annulus_cutoff(xi, N)
    elif selector == "below":
        if N < 1.0:
            raise ValueError("'below' needs N >= 1")
        # chi + sum_{N' < N} phi_{N'} telescopes to chi(xi / N)
        mult = smooth_cutoff(xi / N)
    elif selector == "near":
        blocks = _block_multipliers(g)
        mult = np.zeros_like(xi)
        for Np, arr in blocks.items():
            if N / 8.0 <= Np <= 8.0 * N:
                mult = mult + arr
    else:
        raise ValueError(f"unknown selector {selector!r}")
    return SpectralField(g, f.coeffs * mult, f.time_tag)


def paraproduct_split(f: SpectralField, g: SpectralField):
    """Decompose the product f*g into high-low, low-high and remainder families.

    Returns three lists: [(N, field)] with field = f_N * g_{<N/8} for N >= 8,
    [(N, field)] with field = f_{<N/8} * g_N for N >= 8, and
    [(N, N', field)] with field = f_N * g_{N'} for dyadic N/8 <= N' <= 8N.
    The fields sum to convolve_fields(f, g) exactly (up to roundoff).
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    blocks = _block_multipliers(f.grid)
    scales = dyadic_scales(f.grid)
    f_blocks = {N: SpectralField(f.grid, f.coeffs * blocks[N], f.time_tag) for N in scales}
    g_blocks = {N: SpectralField(g.grid, g.coeffs * blocks[N], g.time_tag) for N in scales}

    high_low = []
    low_high = []
    remainder = []
    for N in scales:
        if N >= 8.0:
            f_lo = dyadic_project(f, N / 8.0, "below")
            g_lo = dyadic_project(g, N / 8.0, "below")
            high_low.append((N, convolve_fields(f_blocks[N], g_lo)))
            low_high.append((N, convolve_fields(f_lo, g_blocks[N])))
        for Np in scales:
            if N / 8.0 <= Np <= 8.0 * N:
                remainder.append((N, Np, convolve_fields(f_blocks[N], g_blocks[Np])))
    return low_high, high_low, remainder


# ---------------------------------------------------------------------------
# Spectral products
# ---------------------------------------------------------------------------

def convolve_fields(f: SpectralField, g: SpectralField) -> SpectralField:
    """Truncated discrete convolution (fhat * ghat)_k(eta) with the d_eta weight.

    Computed by an FFT linear convolution on an enlarged grid (zero padding
    to the full output size, which subsumes the 3/2 dealiasing rule) and
    cropped back to the lattice; output frequencies beyond the truncation
    are dropped.
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    gr = f.grid
    full = fftconvolve(f.coeffs, g.coeffs, mode="full")
    km, jm = gr.k_max, gr.n_eta // 2
    crop = full[2 * km - km : 2 * km + km + 1, 2 * jm - jm : 2 * jm + jm + 1]
    return SpectralField(gr, crop * gr.d_eta, f.time_tag)


def product_fields(f: SpectralField, g: SpectralField) -> SpectralField:
    """Spectral coefficients of the pointwise product of the physical fields."""
    out = convolve_fields(f, g)
    out.coeffs /= 2.0 * np.pi
    return out


def convolve_direct(f: SpectralField, g: SpectralField) -> SpectralField:
    """O(n^2) reference convolution; oracle for convolve_fields on small grids."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    gr = f.grid
    K, J = gr.shape
    out = np.zeros((K, J), dtype=np.complex128)
    fc, gc = f.coeffs, g.coeffs
    for i1 in range(K):
        off_i = i1 - gr.k_max  # out row = i2 + off_i
        r0, r1 = max(0, off_i), min(K, K + off_i)
        for j1 in range(J):
            a = fc[i1, j1]
            if a == 0:
                continue
            off_j = j1 - gr.n_eta // 2
            c0, c1 = max(0, off_j), min(J, J + off_j)
            out[r0:r1, c0:c1] += a * gc[r0 - off_i : r1 - off_i, c0 - off_j : c1 - off_j]
    return SpectralField(gr, out * gr.d_eta, f.time_tag)


def apply_multiplier(f: SpectralField, mult: np.ndarray) -> SpectralField:
    """Multiply coefficients by a lattice array (Fourier multiplier)."""
    if mult.shape != f.grid.shape:
        raise ValueError("multiplier shape mismatch")
    return SpectralField(f.grid, f.coeffs * mult, f.time_tag)

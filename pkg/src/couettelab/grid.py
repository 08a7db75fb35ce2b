"""Frequency lattice and spectral fields for the sheared-frame problem.

The horizontal direction lives on the 2*pi torus, so wavenumbers k are the
integers in [-k_max, k_max].  The vertical direction y is periodized to
[-L_y, L_y), which samples the vertical frequency on the lattice
eta_j = j * d_eta with d_eta = 2*pi / (2*L_y).

Fields are stored as dense complex coefficient arrays indexed (k, j).
Real-valued physical fields carry the conjugate symmetry
fhat[-k](-eta) == conj(fhat[k](eta)).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "SpectralField",
    "make_grid",
    "zero_field",
    "random_real_field",
    "inner_product",
    "l2_norm",
    "to_physical",
    "save_field",
    "load_field",
    "field_to_csv",
]

_HEADER = struct.Struct("<qqdd")  # k_max, n_eta, d_eta, time_tag


@dataclass(frozen=True)
class GridSpec:
    """Truncated (k, eta) lattice.

    Parameters
    ----------
    k_max : int
        Largest horizontal wavenumber kept; k runs over [-k_max, k_max].
    n_eta : int
        Even number of vertical frequency steps; eta_j = j * d_eta for
        j in [-n_eta/2, n_eta/2], i.e. n_eta + 1 samples.
    d_eta : float
        Vertical frequency spacing, pi / L_y.
    L_y : float
        Half-period of the periodized vertical domain.
    """

    k_max: int
    n_eta: int
    d_eta: float
    L_y: float

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.n_eta < 2 or self.n_eta % 2 != 0:
            raise ValueError("n_eta must be even and >= 2")
        if self.d_eta <= 0 or self.L_y <= 0:
            raise ValueError("d_eta and L_y must be positive")
        if abs(self.d_eta * self.L_y - np.pi) > 1e-9 * np.pi:
            raise ValueError("d_eta must equal pi / L_y")

    @property
    def eta_max(self) -> float:
        return 0.5 * self.n_eta * self.d_eta

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.k_max + 1, self.n_eta + 1)

    @property
    def n_points(self) -> int:
        return self.shape[0] * self.shape[1]

    @cached_property
    def k_values(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    @cached_property
    def eta_values(self) -> np.ndarray:
        half = self.n_eta // 2
        return np.arange(-half, half + 1) * self.d_eta

    @cached_property
    def k_grid(self) -> np.ndarray:
        """k broadcast over the lattice, shape (2*k_max+1, n_eta+1)."""
        return np.repeat(self.k_values[:, None], self.n_eta + 1, axis=1)

    @cached_property
    def eta_grid(self) -> np.ndarray:
        return np.repeat(self.eta_values[None, :], 2 * self.k_max + 1, axis=0)

    @cached_property
    def abs_l1(self) -> np.ndarray:
        """|k, eta| = |k| + |eta| on the lattice (the paper's vector length)."""
        return np.abs(self.k_grid) + np.abs(self.eta_grid)

    @cached_property
    def bracket_sq(self) -> np.ndarray:
        """<k, eta>^2 = 1 + (|k| + |eta|)^2."""
        return 1.0 + self.abs_l1**2

    def index_of(self, k: int, eta: float) -> tuple[int, int]:
        """Array indices of mode (k, eta); eta must sit on the lattice."""
        j = eta / self.d_eta
        j_int = int(round(j))
        if abs(j - j_int) > 1e-9:
            raise ValueError(f"eta={eta} is not on the lattice (d_eta={self.d_eta})")
        if abs(k) > self.k_max or abs(j_int) > self.n_eta // 2:
            raise ValueError(f"mode ({k}, {eta}) outside the lattice")
        return k + self.k_max, j_int + self.n_eta // 2


def make_grid(k_max: int, eta_max: float, L_y: float) -> GridSpec:
    """Build the lattice covering |k| <= k_max, |eta| <= eta_max.

    eta_max must be an integer multiple of the spacing d_eta = pi / L_y,
    otherwise the requested cutoff is not representable and the call is
    rejected.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if eta_max <= 0 or L_y <= 0:
        raise ValueError("eta_max and L_y must be positive")
    d_eta = np.pi / L_y
    ratio = eta_max / d_eta
    half = int(round(ratio))
    if half < 1 or abs(ratio - half) > 1e-9:
        raise ValueError(
            f"eta_max={eta_max} is not a positive integer multiple of d_eta={d_eta}"
        )
    return GridSpec(k_max=k_max, n_eta=2 * half, d_eta=d_eta, L_y=L_y)


@dataclass
class SpectralField:
    """Complex coefficients fhat_k(eta_j) on a GridSpec lattice.

    time_tag records the moving-frame time the coefficients belong to.
    """

    grid: GridSpec
    coeffs: np.ndarray
    time_tag: float = 0.0

    def __post_init__(self) -> None:
        expected = self.grid.shape
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {expected}")
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.time_tag)

    def get_mode(self, k: int, eta: float) -> complex:
        i, j = self.grid.index_of(k, eta)
        return complex(self.coeffs[i, j])

    def set_mode(self, k: int, eta: float, value: complex, conjugate: bool = True) -> None:
        """Set one coefficient; with conjugate=True also the (-k, -eta) partner."""
        i, j = self.grid.index_of(k, eta)
        self.coeffs[i, j] = value
        if conjugate:
            i2, j2 = self.grid.index_of(-k, -eta)
            if (i2, j2) != (i, j):
                self.coeffs[i2, j2] = np.conj(value)

    def conj_symmetry_error(self) -> float:
        """Max |fhat[-k](-eta) - conj(fhat[k](eta))| over the lattice."""
        flipped = np.conj(self.coeffs[::-1, ::-1])
        return float(np.max(np.abs(self.coeffs - flipped)))

    def zero_mode_norm(self) -> float:
        """Discrete L2 norm of the k = 0 row."""
        row = self.coeffs[self.grid.k_max, :]
        return float(np.sqrt(np.sum(np.abs(row) ** 2) * self.grid.d_eta))


def zero_field(grid: GridSpec, time_tag: float = 0.0) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128), time_tag)


def random_real_field(
    grid: GridSpec,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    zero_mean: bool = True,
) -> SpectralField:
    """Random conjugate-symmetric field, optionally with the k=0 row zeroed."""
    raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    coeffs = 0.5 * (raw + np.conj(raw[::-1, ::-1]))
    if zero_mean:
        coeffs[grid.k_max, :] = 0.0
    else:
        # the k = 0 row must be conjugate-even in eta for a real field;
        # the symmetrization above already arranged that
        coeffs[grid.k_max, grid.n_eta // 2] = np.real(
            coeffs[grid.k_max, grid.n_eta // 2]
        )
    return SpectralField(grid, amplitude * coeffs)


def inner_product(f: SpectralField, g: SpectralField) -> complex:
    """Discrete <f, g> = sum conj(fhat) ghat * d_eta (Plancherel pairing)."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    return complex(np.sum(np.conj(f.coeffs) * g.coeffs) * f.grid.d_eta)


def l2_norm(f: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2) * f.grid.d_eta))


def to_physical(
    f: SpectralField,
    z_points: np.ndarray | None = None,
    y_points: np.ndarray | None = None,
) -> np.ndarray:
    """Evaluate the field on a physical sample grid (direct summation).

    f(z, y) = (1/2pi) sum_k sum_j fhat_k(eta_j) exp(i(k z + eta_j y)) d_eta.
    Intended for diagnostics and tests; cost is O(n_modes * n_samples).
    """
    g = f.grid
    if z_points is None:
        z_points = np.linspace(0.0, 2 * np.pi, 2 * g.k_max + 1, endpoint=False)
    if y_points is None:
        y_points = np.linspace(-g.L_y, g.L_y, g.n_eta + 1, endpoint=False)
    phase_z = np.exp(1j * np.outer(g.k_values, z_points))  # (K, Nz)
    phase_y = np.exp(1j * np.outer(g.eta_values, y_points))  # (J, Ny)
    # sum_k sum_j c[k,j] e^{ikz} e^{i eta y}
    out = np.einsum("kj,kz,jy->zy", f.coeffs, phase_z, phase_y)
    return out * (g.d_eta / (2 * np.pi))


def save_field(f: SpectralField, path) -> None:
    """Write the flat binary snapshot layout.

    Header: k_max (int64), n_eta (int64), d_eta (float64), time_tag
    (float64), all little-endian; then the coefficients row-major over
    (k, eta) as (re, im) float64 pairs.
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.k_max, g.n_eta, g.d_eta, f.time_tag))
        inter = np.empty(g.shape + (2,), dtype="<f8")
        inter[..., 0] = f.coeffs.real
        inter[..., 1] = f.coeffs.imag
        fh.write(inter.tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        k_max, n_eta, d_eta, time_tag = _HEADER.unpack(fh.read(_HEADER.size))
        grid = GridSpec(k_max=int(k_max), n_eta=int(n_eta), d_eta=d_eta, L_y=np.pi / d_eta)
        raw = np.frombuffer(fh.read(), dtype="<f8").reshape(grid.shape + (2,))
        coeffs = raw[..., 0] + 1j * raw[..., 1]
    return SpectralField(grid, coeffs.copy(), time_tag)


def field_to_csv(f: SpectralField, path) -> None:
    g = f.grid
    with open(path, "w") as fh:
        fh.write("k,eta,re,im\n")
        for i, k in enumerate(g.k_values):
            for j, eta in enumerate(g.eta_values):
                c = f.coeffs[i, j]
                fh.write(f"{k:d},{eta:.17g},{c.real:.17g},{c.imag:.17g}\n")

"""Periodic spectral grid on the torus [0, 2pi)^2.

Coefficient arrays are stored in FFT order (frequencies 0..n/2-1, -n/2..-1)
with xi1 on the last axis, xi2 on the first, so that row-major storage has
xi1 fastest.  The transform convention is

    coeffs(xi) = (2pi/n)^2 * sum_j f(x_j) exp(-i xi . x_j),
    f(x_j)     = (1/(2pi)^2) * sum_xi coeffs(xi) exp(+i xi . x_j),

mirroring the continuum Fourier transform on the box.  Under this
convention the discrete Parseval identity reads

    ||f||_{L^2}^2 = int |f|^2 dx = (1/(2pi)^2) * sum_xi |coeffs(xi)|^2,

so every L^2-type norm in this package divides the coefficient l2 sum
by a single constant 2pi.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, OverflowRangeError

TWO_PI = 2.0 * np.pi

# log(float64 max) with a little headroom
MAX_EXPONENT = 700.0

SNAPSHOT_MAGIC = b"DKGF"
SNAPSHOT_VERSION = 1


class FourierGrid:
    """Square lattice of integer modes {-n/2, ..., n/2-1}^2."""

    def __init__(self, n, dealias_fraction=2.0 / 3.0):
        if n % 2 != 0 or n < 8:
            raise ConfigurationError(f"grid size must be even and >= 8, got {n}")
        if not 0.0 < dealias_fraction <= 1.0:
            raise ConfigurationError(
                f"dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )
        self.n = int(n)
        self.dealias_fraction = float(dealias_fraction)
        freqs = np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)
        self.freqs = freqs
        self.xi1 = freqs[None, :].repeat(self.n, axis=0)
        self.xi2 = freqs[:, None].repeat(self.n, axis=1)
        self.abs_xi = np.hypot(self.xi1, self.xi2)
        self.l1_xi = np.abs(self.xi1) + np.abs(self.xi2)
        self.angles_xi = np.sqrt(1.0 + self.abs_xi**2)
        # 2/3-rule mask: keep |xi_i| < n * fraction / 2 on each axis
        cut = self.n * self.dealias_fraction / 2.0
        self.dealias_mask = (np.abs(self.xi1) < cut) & (np.abs(self.xi2) < cut)

    def __eq__(self, other):
        return (
            isinstance(other, FourierGrid)
            and self.n == other.n
            and self.dealias_fraction == other.dealias_fraction
        )

    def __hash__(self):
        return hash((self.n, self.dealias_fraction))

    def __repr__(self):
        return f"FourierGrid(n={self.n})"

    @property
    def max_l1(self):
        # both components at the extreme mode -n/2
        return float(self.n)

    def dyadic_blocks(self):
        """Dyadic N = 1, 2, 4, ... covering every |xi| on the lattice."""
        blocks = [1]
        max_abs = float(self.abs_xi.max())
        while blocks[-1] <= max_abs:
            blocks.append(2 * blocks[-1])
        return blocks


def dyadic_band_mask(values, band):
    """Characteristic function of S_N: S_1 = (-1,1), S_N = (-N,-N/2] u [N/2,N).

    Both half-open ends reduce to N/2 <= |v| < N, so the mask is symmetric.
    """
    band = int(band)
    if band < 1 or band & (band - 1):
        raise DomainError(f"dyadic band must be a power of two >= 1, got {band}")
    a = np.abs(values)
    if band == 1:
        return a < 1.0
    return (a >= band / 2.0) & (a < band)


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a scalar function on a FourierGrid."""

    grid: FourierGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.coeffs.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"coefficient shape {self.coeffs.shape} does not match grid n={self.grid.n}"
            )
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy())

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def _check(self, other):
        if self.grid != other.grid:
            raise ConfigurationError("fields live on different grids")

    def l2_norm(self):
        """L^2(torus) norm under the module normalization."""
        return float(np.linalg.norm(self.coeffs)) / TWO_PI

    def is_real(self, tol=1e-12):
        """Conjugate symmetry coeffs(-xi) = conj(coeffs(xi)), relative tolerance."""
        flipped = reflect(self.coeffs)
        scale = max(float(np.abs(self.coeffs).max()), 1e-300)
        return float(np.abs(self.coeffs - np.conj(flipped)).max()) <= tol * scale


def zeros(grid):
    return SpectralField(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))


def reflect(coeffs):
    """coeffs evaluated at -xi (mod n), in FFT storage order."""
    out = coeffs[::-1, ::-1]
    return np.roll(out, (1, 1), axis=(0, 1))


def forward_transform(grid, samples):
    """Physical samples on the n x n collocation grid -> SpectralField."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n, grid.n):
        raise ConfigurationError(
            f"sample shape {samples.shape} does not match grid n={grid.n}"
        )
    coeffs = np.fft.fft2(samples) * (TWO_PI / grid.n) ** 2
    return SpectralField(grid, coeffs)


def inverse_transform(f):
    """SpectralField -> physical samples (complex; take .real for real fields)."""
    n = f.grid.n
    return np.fft.ifft2(f.coeffs) * (n / TWO_PI) ** 2


class MultiplierSymbol:
    """Scalar symbol h(xi) from the closed catalog of the package.

    Catalog: +-|xi|, <xi>^s (any real s, covering <xi> and <xi>^-1),
    exp(sigma*||xi||) with ||xi|| = |xi1| + |xi2|, and products thereof.
    """

    def __init__(self, name, fn, gevrey_sigma=0.0):
        self.name = name
        self._fn = fn
        self.gevrey_sigma = gevrey_sigma  # summed exp-weight, for overflow guard

    @classmethod
    def abs_xi(cls, sign=+1):
        s = "+" if sign > 0 else "-"
        return cls(f"{s}|xi|", lambda g: sign * g.abs_xi)

    @classmethod
    def angles_pow(cls, s):
        return cls(f"<xi>^{s}", lambda g: g.angles_xi**s)

    @classmethod
    def exp_gevrey(cls, sigma):
        if sigma < 0:
            raise DomainError(f"Gevrey weight needs sigma >= 0, got {sigma}")
        return cls(
            f"exp({sigma}||xi||)", lambda g: np.exp(sigma * g.l1_xi), gevrey_sigma=sigma
        )

    @classmethod
    def identity(cls):
        return cls("1", lambda g: np.ones((g.n, g.n)))

    def __mul__(self, other):
        return MultiplierSymbol(
            f"{self.name}*{other.name}",
            lambda g: self._fn(g) * other._fn(g),
            gevrey_sigma=self.gevrey_sigma + other.gevrey_sigma,
        )

    def check_range(self, grid):
        if self.gevrey_sigma * grid.max_l1 > MAX_EXPONENT:
            raise OverflowRangeError(self.gevrey_sigma, grid.max_l1, MAX_EXPONENT)

    def on_grid(self, grid):
        self.check_range(grid)
        return self._fn(grid)


def check_gevrey_range(sigma, grid):
    """Overflow guard shared by every exp(sigma*||xi||) evaluation."""
    if sigma * grid.max_l1 > MAX_EXPONENT:
        raise OverflowRangeError(sigma, grid.max_l1, MAX_EXPONENT)


def apply_multiplier(f, h):
    """coeffs_out(xi) = h(xi) * coeffs_in(xi), no transform round-trip."""
    return SpectralField(f.grid, f.coeffs * h.on_grid(f.grid))


def dyadic_project(f, band):
    """P_N: keep modes with |xi| in S_N."""
    mask = dyadic_band_mask(f.grid.abs_xi, band)
    return SpectralField(f.grid, np.where(mask, f.coeffs, 0.0))


def dealiased_product(f, g):
    """Pointwise product with the 2/3 rule applied before and after.

    Equals the exact (continuum-normalized) convolution of the retained
    coefficients: with K = n/3 retained per axis, triple sums |xi_a + xi_b|
    that alias wrap to modes outside the retained set.
    """
    f._check(g)
    grid = f.grid
    mask = grid.dealias_mask
    fp = inverse_transform(SpectralField(grid, np.where(mask, f.coeffs, 0.0)))
    gp = inverse_transform(SpectralField(grid, np.where(mask, g.coeffs, 0.0)))
    out = forward_transform(grid, fp * gp)
    out.coeffs[~mask] = 0.0
    return out


def dense_convolution(f, g):
    """O(n^4) convolution oracle: (fg)^(xi) = (1/2pi)^2 sum_eta f(xi-eta) g(eta).

    Exact (non-periodized) convolution of the stored modes; sums falling
    outside the lattice are dropped.  Used for verifying dealiased_product
    on small grids.
    """
    f._check(g)
    grid = f.grid
    n = grid.n
    freqs = grid.freqs
    out = np.zeros((n, n), dtype=np.complex128)
    index = {int(k): i for i, k in enumerate(freqs)}
    lo, hi = -n // 2, n // 2 - 1
    for j2, k2 in enumerate(freqs):
        for j1, k1 in enumerate(freqs):
            acc = 0.0 + 0.0j
            for i2, e2 in enumerate(freqs):
                d2 = k2 - e2
                if d2 < lo or d2 > hi:
                    continue
                r2 = index[int(d2)]
                for i1, e1 in enumerate(freqs):
                    d1 = k1 - e1
                    if d1 < lo or d1 > hi:
                        continue
                    acc += f.coeffs[r2, index[int(d1)]] * g.coeffs[i2, i1]
            out[j2, j1] = acc
    return SpectralField(grid, out / TWO_PI**2)


def write_snapshot(path, fields):
    """Binary snapshot: header {DKGF, version, n, count}, then raw coefficients.

    Coefficients are complex128 little-endian, row-major with xi1 fastest,
    frequencies in FFT order.
    """
    fields = list(fields)
    if not fields:
        raise ConfigurationError("snapshot needs at least one field")
    n = fields[0].grid.n
    for f in fields:
        if f.grid.n != n:
            raise ConfigurationError("snapshot fields must share one grid")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<III", SNAPSHOT_VERSION, n, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes())


def read_snapshot(path, grid=None):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ConfigurationError(f"bad snapshot magic {magic!r}")
        version, n, count = struct.unpack("<III", fh.read(12))
        if version != SNAPSHOT_VERSION:
            raise ConfigurationError(f"unsupported snapshot version {version}")
        if grid is None:
            grid = FourierGrid(n)
        elif grid.n != n:
            raise ConfigurationError(f"snapshot n={n} does not match grid n={grid.n}")
        out = []
        for _ in range(count):
            raw = fh.read(16 * n * n)
            coeffs = np.frombuffer(raw, dtype="<c16").reshape(n, n).astype(np.complex128)
            out.append(SpectralField(grid, coeffs))
    return out

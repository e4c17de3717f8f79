"""Space-time Fourier analysis on the periodic window [0, T) x torus.

A SpaceTimeField is a uniformly sampled time series of spatial Fourier
coefficient frames.  Its space-time transform lives on the lattice
(tau_k, xi) with tau_k = 2*pi*k/T, and supports modulation projections
Q_L (dyadic bands of |tau + h(xi)|), the weighted norms

    ( sum_L L^{b p} || e^{sigma ||xi||} <xi>^s chi_L(tau + h(xi)) u_hat ||^p )^{1/p},

and Monte-Carlo measurement of the bilinear, trilinear and commutator
inequalities used by the radius certificate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dirac import ALPHA1, ALPHA2, _sign_value, apply_projection
from .errors import ConfigurationError, DomainError, PreconditionError
from .grid import (
    MAX_EXPONENT,
    TWO_PI,
    FourierGrid,
    SpectralField,
    apply_multiplier,
    check_gevrey_range,
    dealiased_product,
    dyadic_band_mask,
    MultiplierSymbol,
)
from .dirac import SpinorField

MIN_TIME_SAMPLES = 8

DISPERSION_NAMES = ("wave+", "wave-", "kg+", "kg-")


def dispersion_symbol(grid, name):
    """h(xi) on the lattice for h in {+|xi|, -|xi|, +<xi>, -<xi>}."""
    if name not in DISPERSION_NAMES:
        raise ConfigurationError(
            f"dispersion must be one of {DISPERSION_NAMES}, got {name!r}"
        )
    base = grid.abs_xi if name.startswith("wave") else grid.angles_xi
    return base if name.endswith("+") else -base


def hann_taper(count):
    """Periodic raised-cosine window normalized to unit mean."""
    w = 0.5 * (1.0 - np.cos(TWO_PI * np.arange(count) / count))
    return w / w.mean()


class SpaceTimeField:
    """Time series of spatial coefficient frames at uniform dt.

    frames[j] holds the spatial Fourier coefficients at t_j = j*dt; the
    record is treated as one period of length T = count*dt.  With
    taper="hann" a unit-mean raised-cosine window is applied in time
    before transforming (for trajectory records); taper="none" treats
    the record as exactly periodic (for synthetic band-limited fields).
    """

    def __init__(self, grid, frames, dt, taper="hann"):
        frames = np.asarray(frames, dtype=np.complex128)
        if frames.ndim != 3 or frames.shape[1:] != (grid.n, grid.n):
            raise ConfigurationError(
                f"frames must have shape (count, {grid.n}, {grid.n})"
            )
        if frames.shape[0] < MIN_TIME_SAMPLES:
            raise ConfigurationError(
                f"need at least {MIN_TIME_SAMPLES} time samples, got {frames.shape[0]}"
            )
        if dt <= 0:
            raise ConfigurationError("dt must be positive")
        if taper not in ("hann", "none"):
            raise ConfigurationError(f"unknown taper {taper!r}")
        self.grid = grid
        self.frames = frames
        self.dt = float(dt)
        self.taper = taper
        self._transform = None

    @property
    def count(self):
        return self.frames.shape[0]

    @property
    def period(self):
        return self.count * self.dt

    @property
    def taus(self):
        return TWO_PI * np.fft.fftfreq(self.count, self.dt)

    def taper_weights(self):
        if self.taper == "hann":
            return hann_taper(self.count)
        return np.ones(self.count)

    def tapered_frames(self):
        return self.frames * self.taper_weights()[:, None, None]

    def transform(self):
        """u_hat(tau_k, xi) = dt * sum_j w_j u_j(xi) e^{-i t_j tau_k}."""
        if self._transform is None:
            self._transform = self.dt * np.fft.fft(self.tapered_frames(), axis=0)
        return self._transform

    def l2_norm(self):
        """L^2 norm over the window (of the tapered record)."""
        u = self.transform()
        return math.sqrt(float(np.sum(np.abs(u) ** 2)) / self.period) / TWO_PI


def field_from_transform(grid, transform, dt):
    """Inverse of SpaceTimeField.transform for an untapered record."""
    frames = np.fft.ifft(np.asarray(transform, dtype=np.complex128), axis=0) / dt
    return SpaceTimeField(grid, frames, dt, taper="none")


def spacetime_transform(field):
    return field.transform()


def modulation_values(field, h):
    """tau + h(xi) on the (tau, xi) lattice, shape (count, n, n)."""
    symbol = dispersion_symbol(field.grid, h)
    return field.taus[:, None, None] + symbol[None, :, :]


def band_index(values):
    """Index k of the dyadic band S_{2^k} containing each |value|."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    idx = np.zeros(a.shape, dtype=np.int64)
    big = a >= 1.0
    idx[big] = np.floor(np.log2(a[big])).astype(np.int64) + 1
    return idx


def modulation_project(field, band, h):
    """Q_L: keep (tau, xi) with |tau + h(xi)| in the dyadic band S_L.

    The projection acts on the tapered transform, so the result carries
    taper "none" (the window is already folded into its frames).
    """
    mask = dyadic_band_mask(modulation_values(field, h), band)
    return field_from_transform(field.grid, field.transform() * mask, field.dt)


@dataclass(frozen=True)
class SpaceTimeNorm:
    """Parameters (sigma, s, b, p, h) of the modulation-weighted norm."""

    sigma: float
    s: float
    b: float
    p: float
    h: str

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")
        if not (self.p >= 1):
            raise ConfigurationError("p must lie in [1, inf]")
        if self.h not in DISPERSION_NAMES:
            raise ConfigurationError(f"unknown dispersion {self.h!r}")


def _band_masses(field, weight_sq, h):
    """Squared weighted transform mass per modulation band index."""
    idx = band_index(modulation_values(field, h))
    u = field.transform()
    w = np.abs(u) ** 2 * weight_sq[None, :, :]
    return np.bincount(idx.ravel(), weights=w.ravel())


def xsb_norm(field, params):
    """The modulation-weighted space-time norm of a scalar or spinor field.

    Spinor input is a pair (c1, c2) of SpaceTimeFields; the two component
    masses add inside the L^2 part of the norm.
    """
    components = field if isinstance(field, tuple) else (field,)
    grid = components[0].grid
    check_gevrey_range(params.sigma, grid)
    weight_sq = np.exp(2.0 * params.sigma * grid.l1_xi) * grid.angles_xi ** (
        2.0 * params.s
    )
    masses = None
    for comp in components:
        m = _band_masses(comp, weight_sq, params.h)
        if masses is None:
            masses = m
        elif m.size > masses.size:
            m[: masses.size] += masses
            masses = m
        else:
            masses[: m.size] += m
    period = components[0].period
    block = np.sqrt(masses / period) / TWO_PI  # L^2_{tau,xi} norm per band
    levels = np.arange(block.size, dtype=np.float64)
    bands = np.exp2(levels)
    terms = bands**params.b * block
    if math.isinf(params.p):
        return float(terms.max(initial=0.0))
    return float(np.sum(terms**params.p) ** (1.0 / params.p))


def embedding_gap(field, sigma, s, h):
    """Sides of sup_t ||u(t)|| <= sum_L L^{1/2} (band L^2 block).

    Returns (sup over time of the weighted spatial norm of the tapered
    record, the modulation-sum bound); their ratio is at most 1.
    """
    grid = field.grid
    check_gevrey_range(sigma, grid)
    weight = np.exp(sigma * grid.l1_xi) * grid.angles_xi**s
    tapered = field.tapered_frames()
    per_frame = np.sqrt(np.sum(np.abs(tapered * weight[None]) ** 2, axis=(1, 2)))
    sup_side = float(per_frame.max()) / TWO_PI
    bound = xsb_norm(field, SpaceTimeNorm(sigma, s, 0.5, 1.0, h))
    return sup_side, bound


def duality_pairing(u, v):
    """integral of u * conj(v) over the window (tapered records)."""
    uh, vh = u.transform(), v.transform()
    return complex(np.sum(uh * np.conj(vh)) / (u.period * TWO_PI**2))


def _conjugate_exponent(p):
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def duality_gap(u, v, s, b, p, h):
    """(|pairing|, norm product) for the dual pair of norms."""
    lhs = abs(duality_pairing(u, v))
    nu = xsb_norm(u, SpaceTimeNorm(0.0, s, b, p, h))
    nv = xsb_norm(v, SpaceTimeNorm(0.0, -s, -b, _conjugate_exponent(p), h))
    return lhs, nu * nv


# ---------------------------------------------------------------------------
# band-restricted product (bilinear) estimates
# ---------------------------------------------------------------------------


def _pair_min_max(x, j, k):
    return min(x[j], x[k]), max(x[j], x[k])


def bilinear_constant(ns, ls, low_output_special=False):
    """Size constant for band-restricted space-time products (c = 1).

    Evaluates min over the four bracket terms built from pairwise
    minima/maxima of the spatial and modulation bands; with the flag set
    (equal inner signs, low output band) the alternative (N0 L1 L2)^{1/2}
    candidate is also admitted.
    """
    n_min, l_min = min(ns), min(ls)
    cands = [math.sqrt(n_min**2 * l_min)]
    for j, k in ((1, 2), (0, 1), (0, 2)):
        njk_min, _ = _pair_min_max(ns, j, k)
        ljk_min, ljk_max = _pair_min_max(ls, j, k)
        cands.append(math.sqrt(n_min * ljk_min) * (njk_min * ljk_max) ** 0.25)
    if low_output_special:
        cands.append(math.sqrt(ns[0] * ls[1] * ls[2]))
    return min(cands)


def _spatial_band_mask(grid, band):
    return dyadic_band_mask(grid.abs_xi, band)


def random_band_transform(grid, count, dt, n_band, l_band, h, rng, shape=()):
    """i.i.d. complex Gaussian coefficients on the (N, L) band.

    Returns a transform-domain array of shape shape + (count, n, n);
    raises if the band contains no lattice points.
    """
    taus = TWO_PI * np.fft.fftfreq(count, dt)
    vals = taus[:, None, None] + dispersion_symbol(grid, h)[None]
    mask = dyadic_band_mask(vals, l_band) & _spatial_band_mask(grid, n_band)[None]
    if not mask.any():
        raise DomainError(
            f"band (N={n_band}, L={l_band}) has no points on this lattice"
        )
    npts = int(mask.sum())
    out = np.zeros(shape + (count, grid.n, grid.n), dtype=np.complex128)
    z = rng.standard_normal(shape + (npts,)) + 1j * rng.standard_normal(
        shape + (npts,)
    )
    out[..., mask] = z
    return out


def _to_physical(transform, grid, dt):
    """Transform-domain array (..., count, n, n) to physical samples."""
    u = np.fft.ifft(transform, axis=-3) / dt
    return np.fft.ifft2(u, axes=(-2, -1)) * (grid.n / TWO_PI) ** 2


def _to_transform(physical, grid, dt):
    u = np.fft.fft2(physical, axes=(-2, -1)) * (TWO_PI / grid.n) ** 2
    return dt * np.fft.fft(u, axis=-3)


def _st_l2(transform, period):
    axes = tuple(range(transform.ndim - 3, transform.ndim))
    return np.sqrt(np.sum(np.abs(transform) ** 2, axis=axes) / period) / TWO_PI


def empirical_bilinear_ratio(
    grid, count, dt, n0, l0, n1, l1, n2, l2, signs=("+", "+", "+"), trials=50, seed=0
):
    """Measured/predicted ratio for one band combination.

    Draws random fields on the (n1, l1) and (n2, l2) bands (dispersion
    sign from signs[1:]), multiplies them pointwise in space-time, and
    compares the output-band L^2 mass against the bilinear constant.
    """
    sweep = bilinear_ratio_sweep(
        grid,
        count,
        dt,
        input_bands=[(n1, l1, n2, l2)],
        output_bands=[(n0, l0)],
        signs=signs,
        trials=trials,
        seed=seed,
    )
    rec = sweep[0]
    return {"max_ratio": rec["max_ratio"], "mean_ratio": rec["mean_ratio"]}


def _sign_char(s):
    return "+" if _sign_value(s) > 0 else "-"


def bilinear_ratio_sweep(
    grid,
    count,
    dt,
    input_bands,
    output_bands,
    signs=("+", "+", "+"),
    trials=50,
    seed=0,
    chunk=25,
):
    """Monte-Carlo sweep of the band-restricted product estimate.

    input_bands is a list of (n1, l1, n2, l2); for each entry the same
    random products are classified into every requested output band
    (n0, l0), giving one record per (n0, l0, n1, l1, n2, l2) with the
    max and mean of measured/predicted over the trials.  Draws are
    seeded per input band, so results do not depend on how the bands
    are split across workers.
    """
    s0, s1, s2 = (_sign_char(s) for s in signs)
    h0, h1, h2 = (f"wave{s}" for s in (s0, s1, s2))
    period = count * dt
    taus = TWO_PI * np.fft.fftfreq(count, dt)
    vals0 = taus[:, None, None] + dispersion_symbol(grid, h0)[None]
    out_masks = {
        (n0, l0): dyadic_band_mask(vals0, l0) & _spatial_band_mask(grid, n0)[None]
        for (n0, l0) in output_bands
    }
    records = []
    for n1, l1, n2, l2 in input_bands:
        rng = np.random.default_rng((seed, n1, l1, n2, l2))
        ratios = {key: [] for key in out_masks}
        done = 0
        while done < trials:
            batch = min(chunk, trials - done)
            t1 = random_band_transform(grid, count, dt, n1, l1, h1, rng, (batch,))
            t2 = random_band_transform(grid, count, dt, n2, l2, h2, rng, (batch,))
            norm1 = _st_l2(t1, period)
            norm2 = _st_l2(t2, period)
            prod = _to_transform(
                _to_physical(t1, grid, dt) * _to_physical(t2, grid, dt), grid, dt
            )
            for (n0, l0), mask in out_masks.items():
                lhs = _st_l2(prod * mask, period)
                special = s1 == s2 and n1 == n2 and 4 * n0 <= n1
                pred = bilinear_constant((n0, n1, n2), (l0, l1, l2), special)
                ratios[(n0, l0)].extend(lhs / (pred * norm1 * norm2))
            done += batch
        for (n0, l0), values in ratios.items():
            arr = np.array(values)
            records.append(
                {
                    "n0": n0,
                    "l0": l0,
                    "n1": n1,
                    "l1": l1,
                    "n2": n2,
                    "l2": l2,
                    "max_ratio": float(arr.max()),
                    "mean_ratio": float(arr.mean()),
                }
            )
    return records


# ---------------------------------------------------------------------------
# trilinear (scalar x spinor x spinor) form
# ---------------------------------------------------------------------------


def _project_transform(grid, a, b, sign):
    """Mode-wise Pi(sign*xi) applied to spinor component arrays (..., n, n)."""
    s = _sign_value(sign)
    r = grid.abs_xi
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(r > 0, (grid.xi1 + 1j * grid.xi2) / np.where(r > 0, r, 1.0), 0.0)
    w = s * w
    return 0.5 * (a + np.conj(w) * b), 0.5 * (w * a + b)


def trilinear_form(phi, psi1, psi2, signs, sigma, method="physical"):
    """integral of (e^{sigma ||D||} phi) <beta Pi_{s1} psi1, Pi_{s2} psi2>.

    phi is a scalar SpaceTimeField; psi1, psi2 are pairs (c1, c2) of
    SpaceTimeFields sharing phi's sampling.  The physical path forms the
    pointwise products on the sample lattice; the spectral path evaluates
    the equivalent convolution sum over (tau, xi, lambda, eta) by explicit
    shifts and is meant as a small-grid cross-check.
    """
    grid = phi.grid
    check_gevrey_range(sigma, grid)
    _, s1, s2 = signs
    weight = np.exp(sigma * grid.l1_xi)

    a_hat = phi.transform() * weight[None]
    p1a, p1b = _project_transform(
        grid, psi1[0].transform(), psi1[1].transform(), s1
    )
    p1b = -p1b  # beta = diag(1, -1)
    q2a, q2b = _project_transform(
        grid, psi2[0].transform(), psi2[1].transform(), s2
    )

    if method == "physical":
        dt, period = phi.dt, phi.period
        a_phys = _to_physical(a_hat, grid, dt)
        inner = _to_physical(p1a, grid, dt) * np.conj(_to_physical(q2a, grid, dt))
        inner += _to_physical(p1b, grid, dt) * np.conj(_to_physical(q2b, grid, dt))
        cell = dt * (TWO_PI / grid.n) ** 2
        return complex(np.sum(a_phys * inner) * cell)
    if method == "spectral":
        period = phi.period
        total = 0.0 + 0.0j
        count = phi.count
        for k in range(count):
            for i in range(grid.n):
                for j in range(grid.n):
                    a = a_hat[k, i, j]
                    if a == 0:
                        continue
                    sh1 = np.roll(np.roll(np.roll(p1a, k, 0), i, 1), j, 2)
                    sh2 = np.roll(np.roll(np.roll(p1b, k, 0), i, 1), j, 2)
                    total += a * np.sum(sh1 * np.conj(q2a) + sh2 * np.conj(q2b))
        return complex(total / (period**2 * TWO_PI**4))
    raise ConfigurationError(f"unknown method {method!r}")


def check_trilinear_hypotheses(a, b0, b1, b2):
    """Admissibility of (a, b0, b1, b2) for the trilinear estimate."""
    if not 0.25 < a <= 0.75:
        raise PreconditionError(f"a must lie in (1/4, 3/4], got {a}")
    floor = max(0.25, 0.75 - a)
    for name, b in (("b0", b0), ("b1", b1), ("b2", b2)):
        if b < floor - 1e-12:
            raise PreconditionError(f"{name} = {b} is below the floor {floor}")
    if b0 + b1 + b2 < 1.5 - a - 1e-12:
        raise PreconditionError(
            f"b0+b1+b2 = {b0 + b1 + b2} is below 3/2 - a = {1.5 - a}"
        )


def _random_smooth_transform(grid, count, dt, rng, decay=0.5, tilt=2.0):
    """Random transform with smooth spatial decay and mild modulation decay."""
    shape = (count, grid.n, grid.n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    spatial = np.exp(-decay * grid.l1_xi) * grid.angles_xi ** (-tilt)
    taus = TWO_PI * np.fft.fftfreq(count, dt)
    temporal = 1.0 / (1.0 + (taus / 4.0) ** 2)
    return z * spatial[None] * temporal[:, None, None]


def empirical_trilinear_ratio(
    grid,
    count,
    dt,
    a,
    b0,
    b1,
    b2,
    signs=("+", "+", "+"),
    sigma=0.0,
    trials=20,
    seed=0,
):
    """Measured/predicted ratio for the trilinear space-time estimate.

    Checks the admissibility of (a, b0, b1, b2) first; the ratio is
    |form| / (||phi||_{0,a,b0;1} ||psi1||_{sigma,0,b1;1} ||psi2||_{sigma,0,b2;1}).
    """
    check_trilinear_hypotheses(a, b0, b1, b2)
    s0, s1, s2 = (_sign_char(s) for s in signs)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        phi = field_from_transform(
            grid, _random_smooth_transform(grid, count, dt, rng), dt
        )
        psi1 = tuple(
            field_from_transform(
                grid, _random_smooth_transform(grid, count, dt, rng), dt
            )
            for _ in range(2)
        )
        psi2 = tuple(
            field_from_transform(
                grid, _random_smooth_transform(grid, count, dt, rng), dt
            )
            for _ in range(2)
        )
        value = abs(trilinear_form(phi, psi1, psi2, (s0, s1, s2), sigma))
        denom = (
            xsb_norm(phi, SpaceTimeNorm(0.0, a, b0, 1.0, f"wave{s0}"))
            * xsb_norm(psi1, SpaceTimeNorm(sigma, 0.0, b1, 1.0, f"wave{s1}"))
            * xsb_norm(psi2, SpaceTimeNorm(sigma, 0.0, b2, 1.0, f"wave{s2}"))
        )
        ratios.append(value / denom)
    arr = np.array(ratios)
    return {
        "max_ratio": float(arr.max()),
        "mean_ratio": float(arr.mean()),
        "trials": trials,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# commutator of the analytic weight with multiplication
# ---------------------------------------------------------------------------


def _beta_projected(psi, sign):
    proj = apply_projection(psi, sign)
    return proj.c1, proj.c2 * (-1.0)


def commutator_field(phi, psi1, sigma, s1):
    """e^{sigma||D||}(phi beta Pi_{s1} psi1) - phi (beta Pi_{s1} e^{sigma||D||} psi1).

    phi is a spatial SpectralField and psi1 a SpinorField; products are
    dealiased.  The result vanishes identically at sigma = 0 and when phi
    has only a zero mode.
    """
    grid = phi.grid
    check_gevrey_range(sigma, grid)
    weight = MultiplierSymbol.exp_gevrey(sigma)
    v1, v2 = _beta_projected(psi1, s1)
    first = tuple(
        apply_multiplier(dealiased_product(phi, v), weight) for v in (v1, v2)
    )
    smooth = SpinorField(
        apply_multiplier(psi1.c1, weight), apply_multiplier(psi1.c2, weight)
    )
    w1, w2 = _beta_projected(smooth, s1)
    second = tuple(dealiased_product(phi, w) for w in (w1, w2))
    return SpinorField(first[0] - second[0], first[1] - second[1])


def commutator_field_dense(phi, psi1, sigma, s1):
    """Direct kernel-weighted convolution oracle for commutator_field.

    Output mode eta receives sum_xi phi_hat(xi) Lambda(xi, eta) v_hat(eta-xi)
    with Lambda = e^{sigma||eta||} - e^{sigma||eta - xi||} (l1 norms); terms
    whose eta - xi falls outside the lattice are dropped, so agreement with
    the pseudospectral version needs band-limited inputs.
    """
    grid = phi.grid
    n = grid.n
    lo, hi = -n // 2, n // 2 - 1
    v1, v2 = _beta_projected(psi1, s1)
    out = [np.zeros((n, n), dtype=np.complex128) for _ in range(2)]
    for i in range(n):
        for j in range(n):
            c = phi.coeffs[i, j]
            if c == 0:
                continue
            xi1, xi2 = int(grid.xi1[i, j]), int(grid.xi2[i, j])
            for oi in range(n):
                for oj in range(n):
                    e1, e2 = int(grid.xi1[oi, oj]), int(grid.xi2[oi, oj])
                    r1, r2 = e1 - xi1, e2 - xi2
                    if not (lo <= r1 <= hi and lo <= r2 <= hi):
                        continue
                    lam = math.exp(sigma * (abs(e1) + abs(e2))) - math.exp(
                        sigma * (abs(r1) + abs(r2))
                    )
                    src = (np.abs(grid.xi1 - r1) + np.abs(grid.xi2 - r2)) == 0
                    for comp, v in zip(out, (v1, v2)):
                        comp[oi, oj] += c * lam * v.coeffs[src][0]
    scale = 1.0 / TWO_PI**2
    return SpinorField(
        SpectralField(grid, out[0] * scale), SpectralField(grid, out[1] * scale)
    )


def _spatial_pairing(u, v):
    """L^2(x) inner product of two spinor fields from coefficients."""
    total = np.sum(u.c1.coeffs * np.conj(v.c1.coeffs))
    total += np.sum(u.c2.coeffs * np.conj(v.c2.coeffs))
    return complex(total / TWO_PI**2)


def _random_spatial(grid, rng, decay=0.5, tilt=2.0):
    shape = (grid.n, grid.n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return SpectralField(
        grid, z * np.exp(-decay * grid.l1_xi) * grid.angles_xi ** (-tilt)
    )


def commutator_ratio(
    grid, sigmas, theta, trials=50, seed=0, signs=("+", "+", "+"), a=0.5
):
    """Scaling of the commutator pairing in the analytic radius sigma.

    For random smooth spatial fields, measures |<commutator, Pi_{s2} psi2>|
    and the ratio against sigma^theta times the weighted-norm product
    ||phi||_{sigma, a+theta} ||psi1||_{sigma, 0} ||psi2||_{L^2}; reports the
    log-log slope of the mean raw size versus sigma (about theta for
    small sigma) and the largest ratio seen.
    """
    if not 0.0 <= theta <= 1.0:
        raise PreconditionError(f"theta must lie in [0, 1], got {theta}")
    _, s1, s2 = signs
    sigmas = [float(s) for s in sigmas]
    sizes = []
    ratios = []
    for sigma in sigmas:
        rng = np.random.default_rng(seed)
        per_sigma = []
        for _ in range(trials):
            phi = _random_spatial(grid, rng)
            psi1 = SpinorField(_random_spatial(grid, rng), _random_spatial(grid, rng))
            psi2 = SpinorField(_random_spatial(grid, rng), _random_spatial(grid, rng))
            comm = commutator_field(phi, psi1, sigma, s1)
            size = abs(_spatial_pairing(comm, apply_projection(psi2, s2)))
            per_sigma.append(size)
            if sigma > 0:
                weight_phi = np.exp(sigma * grid.l1_xi) * grid.angles_xi ** (a + theta)
                weight_psi = np.exp(sigma * grid.l1_xi)
                nphi = float(np.linalg.norm(phi.coeffs * weight_phi)) / TWO_PI
                npsi1 = (
                    math.hypot(
                        np.linalg.norm(psi1.c1.coeffs * weight_psi),
                        np.linalg.norm(psi1.c2.coeffs * weight_psi),
                    )
                    / TWO_PI
                )
                npsi2 = math.hypot(psi2.c1.l2_norm(), psi2.c2.l2_norm())
                ratios.append(size / (sigma**theta * nphi * npsi1 * npsi2))
        sizes.append(float(np.mean(per_sigma)))
    positive = [s for s in sigmas if s > 0]
    slope = float("nan")
    if len(positive) >= 2:
        logs = np.log([s for s in sigmas if s > 0])
        logv = np.log([v for s, v in zip(sigmas, sizes) if s > 0])
        slope = float(np.polyfit(logs, logv, 1)[0])
    return {
        "sigmas": sigmas,
        "mean_sizes": sizes,
        "slope": slope,
        "max_ratio": float(max(ratios)) if ratios else 0.0,
        "trials": trials,
        "seed": seed,
        "theta": theta,
    }

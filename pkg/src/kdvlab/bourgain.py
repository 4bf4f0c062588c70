"""Discrete Bourgain-type norms on a space-time rectangle, plus probes.

Norms are lattice sums over the 2D discrete Fourier coefficients of complex
samples on [-X, X) x [-T0, T0).  The dispersion phase is xi^3 - xi throughout,
matching the free propagator e^{i(xi^3 - xi) t}; continuous integrals become
sums with the rectangle's natural frequency spacings, so all probes are
refinement-stable ratios, never absolute constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UndefinedRatioError

__all__ = [
    "PlaneField",
    "xsb_norm",
    "lambda_alpha",
    "x_alpha_norm",
    "p_alpha",
    "g_s",
    "q_sb",
    "ysb_norm",
    "dx_product",
    "bilinear_ratio",
    "free_field",
    "ensemble_field",
    "smooth_time_bump",
    "line_hs_norm",
]


def _power_of_two(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class PlaneField:
    """Complex samples w[ix, it] on the rectangle [-X, X) x [-T0, T0).

    The 2D Fourier coefficients are cached with unitary (Plancherel)
    normalization: sum |w|^2 dx dt = sum |coeffs|^2 dxi dtau.
    """

    values: np.ndarray
    x_extent: float
    t_extent: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=complex)
        if arr.ndim != 2:
            raise InvalidArgumentError("plane field needs 2-d samples")
        nx, nt = arr.shape
        if not (_power_of_two(nx) and _power_of_two(nt) and nx >= 64 and nt >= 64):
            raise InvalidArgumentError("lattice sizes must be powers of two >= 64")
        if not (self.x_extent > 0 and self.t_extent > 0):
            raise InvalidArgumentError("extents must be positive")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidArgumentError("samples contain non-finite entries")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        coeffs = np.fft.fft2(arr) * (self.dx * self.dt / (2.0 * np.pi))
        coeffs.setflags(write=False)
        object.__setattr__(self, "_coeffs", coeffs)

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def nt(self) -> int:
        return self.values.shape[1]

    @property
    def dx(self) -> float:
        return 2.0 * self.x_extent / self.nx

    @property
    def dt(self) -> float:
        return 2.0 * self.t_extent / self.nt

    @property
    def x(self) -> np.ndarray:
        return -self.x_extent + self.dx * np.arange(self.nx)

    @property
    def t(self) -> np.ndarray:
        return -self.t_extent + self.dt * np.arange(self.nt)

    @property
    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)

    @property
    def tau(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nt, d=self.dt)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / (self.nx * self.dx)

    @property
    def dtau(self) -> float:
        return 2.0 * np.pi / (self.nt * self.dt)

    def plane_l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.dx * self.dt))


def _bracket(z: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + z**2)


def _dispersion(xi: np.ndarray) -> np.ndarray:
    return xi**3 - xi


def _check(name: str, value: float, lo: float, hi: float, open_lo=False, open_hi=False):
    bad_lo = value <= lo if open_lo else value < lo
    bad_hi = value >= hi if open_hi else value > hi
    if bad_lo or bad_hi:
        raise InvalidArgumentError(f"{name}={value} outside the supported range")


def xsb_norm(w: PlaneField, s: float, b: float) -> float:
    """Dispersive-weight norm: sum <tau - (xi^3 - xi)>^{2b} <xi>^{2s} |what|^2."""
    _check("s", s, -1.0, 1.0)
    _check("b", b, 0.0, 1.0)
    dist = w.tau[None, :] - _dispersion(w.xi)[:, None]
    weight = _bracket(dist) ** (2.0 * b) * (_bracket(w.xi) ** (2.0 * s))[:, None]
    total = np.sum(weight * np.abs(w.coeffs) ** 2) * w.dxi * w.dtau
    return float(np.sqrt(total))


def lambda_alpha(w: PlaneField, alpha: float) -> float:
    """Low-spatial-frequency tail: <tau>^{2 alpha} over the strip |xi| <= 1."""
    _check("alpha", alpha, 0.0, 1.0)
    strip = np.abs(w.xi) <= 1.0
    weight = _bracket(w.tau) ** (2.0 * alpha)
    total = np.sum(weight[None, :] * np.abs(w.coeffs[strip]) ** 2) * w.dxi * w.dtau
    return float(np.sqrt(total))


def x_alpha_norm(w: PlaneField, s: float, b: float, alpha: float) -> float:
    """sqrt(xsb_norm^2 + lambda_alpha^2)."""
    _check("alpha", alpha, 0.5, 1.0, open_lo=True)
    return float(np.hypot(xsb_norm(w, s, b), lambda_alpha(w, alpha)))


def p_alpha(w: PlaneField, alpha: float) -> float:
    strip = np.abs(w.xi) <= 1.0
    weight = (1.0 + np.abs(w.tau)) ** (-2.0 * (1.0 - alpha))
    total = np.sum(weight[None, :] * np.abs(w.coeffs[strip]) ** 2) * w.dxi * w.dtau
    return float(np.sqrt(total))


def g_s(w: PlaneField, s: float) -> float:
    dist = np.abs(w.tau[None, :] - _dispersion(w.xi)[:, None])
    inner = np.sum(np.abs(w.coeffs) / (1.0 + dist), axis=1) * w.dtau
    total = np.sum((1.0 + np.abs(w.xi)) ** (2.0 * s) * inner**2) * w.dxi
    return float(np.sqrt(total))


def q_sb(w: PlaneField, s: float, b: float) -> float:
    dist = np.abs(w.tau[None, :] - _dispersion(w.xi)[:, None])
    weight = (1.0 + dist) ** (-2.0 * b) * ((1.0 + np.abs(w.xi)) ** (2.0 * s))[:, None]
    total = np.sum(weight * np.abs(w.coeffs) ** 2) * w.dxi * w.dtau
    return float(np.sqrt(total))


def ysb_norm(w: PlaneField, s: float, b: float, alpha: float) -> float:
    """sqrt(P_alpha^2 + G_s^2 + Q_{s,b}^2), the dual-side norm."""
    _check("b", b, 0.0, 1.0, open_hi=True)
    _check("alpha", alpha, 0.5, 1.0, open_lo=True)
    return float(np.sqrt(p_alpha(w, alpha) ** 2 + g_s(w, s) ** 2 + q_sb(w, s, b) ** 2))


def dx_product(u: PlaneField, v: PlaneField) -> PlaneField:
    """d/dx (u v): pointwise product, derivative taken spectrally."""
    if u.values.shape != v.values.shape or u.x_extent != v.x_extent or u.t_extent != v.t_extent:
        raise InvalidArgumentError("plane fields live on different lattices")
    prod = u.values * v.values
    dprod = np.fft.ifft(1j * u.xi[:, None] * np.fft.fft(prod, axis=0), axis=0)
    return PlaneField(dprod, u.x_extent, u.t_extent)


def bilinear_ratio(
    u: PlaneField,
    v: PlaneField,
    s: float,
    b: float,
    alpha: float,
    t_support: float,
) -> float:
    """||d_x(uv)||_Y / (||u||_X ||v||_X) for time-windowed fields."""
    for w in (u, v):
        outside = np.abs(w.t) > t_support * (1.0 + 1e-9)
        if np.any(outside):
            peak = float(np.max(np.abs(w.values))) or 1.0
            if float(np.max(np.abs(w.values[:, outside]))) > 1e-9 * peak:
                raise InvalidArgumentError(
                    f"field has support beyond |t| <= {t_support}"
                )
    den = x_alpha_norm(u, s, b, alpha) * x_alpha_norm(v, s, b, alpha)
    if den == 0.0:
        raise UndefinedRatioError("bilinear ratio undefined for zero input")
    return float(ysb_norm(dx_product(u, v), s, b, alpha) / den)


# ---------------------------------------------------------------------------
# Field construction
# ---------------------------------------------------------------------------

def smooth_time_bump(t: np.ndarray, t_support: float) -> np.ndarray:
    """C-infinity bump equal to exp(1 - 1/(1 - (t/T)^2)) inside |t| < T."""
    u = t / t_support
    out = np.zeros_like(t)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def free_field(
    mode_coeffs: np.ndarray,
    size: int = 64,
    x_extent: float = 8.0 * np.pi,
    t_extent: float = 2.0,
    t_support: float | None = 1.0,
) -> PlaneField:
    """Windowed free evolution of a band-limited line datum.

    mode_coeffs[k] multiplies e^{i xi_k x} for k = -K..K (array of length
    2K + 1, index order -K..K); the evolution phase is e^{i(xi^3 - xi) t};
    t_support = None skips the time window.
    """
    coeffs = np.asarray(mode_coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) % 2 == 0:
        raise InvalidArgumentError("mode_coeffs must have odd length -K..K")
    K = (len(coeffs) - 1) // 2
    dx = 2.0 * x_extent / size
    if K * np.pi / x_extent >= np.pi / dx:
        raise InvalidArgumentError("mode cap exceeds the lattice Nyquist frequency")
    x = -x_extent + dx * np.arange(size)
    t = -t_extent + (2.0 * t_extent / size) * np.arange(size)
    k = np.arange(-K, K + 1)
    xi = np.pi * k / x_extent
    spatial = np.exp(1j * np.outer(x, xi))  # (nx, K)
    temporal = np.exp(1j * np.outer(_dispersion(xi), t))  # (K, nt)
    vals = spatial @ (coeffs[:, None] * temporal)
    if t_support is not None:
        vals = vals * smooth_time_bump(t, t_support)[None, :]
    return PlaneField(vals, x_extent, t_extent)


def ensemble_mode_coeffs(
    master_seed: int, draw: int, s: float, mode_cap: int = 14
) -> np.ndarray:
    """Gaussian coefficients with a <xi>^{-s-1} envelope, keyed per mode.

    Coefficients depend only on (master_seed, draw, mode index), so lattice
    refinement leaves the underlying datum unchanged."""
    rng = np.random.default_rng(np.random.SeedSequence([master_seed, draw]))
    k = np.arange(-mode_cap, mode_cap + 1)
    xi = np.pi * k / (8.0 * np.pi)
    raw = rng.normal(size=len(k)) + 1j * rng.normal(size=len(k))
    return raw * _bracket(xi) ** (-s - 1.0)


def ensemble_field(
    master_seed: int,
    draw: int,
    s: float,
    size: int = 64,
    t_support: float = 1.0,
    mode_cap: int = 14,
) -> PlaneField:
    """One seeded draw: windowed free evolution of a random band-limited datum."""
    coeffs = ensemble_mode_coeffs(master_seed, draw, s, mode_cap)
    return free_field(coeffs, size=size, t_support=t_support)


def line_hs_norm(samples: np.ndarray, dx: float, s: float) -> float:
    """Whole-line H^s norm of periodic lattice samples (spectral weights)."""
    samples = np.asarray(samples, dtype=complex)
    coeffs = np.fft.fft(samples) * dx / np.sqrt(2.0 * np.pi)
    xi = 2.0 * np.pi * np.fft.fftfreq(len(samples), d=dx)
    dxi = 2.0 * np.pi / (len(samples) * dx)
    total = np.sum(_bracket(xi) ** (2.0 * s) * np.abs(coeffs) ** 2) * dxi
    return float(np.sqrt(total))

"""Fractional Sobolev norms H^s on an interval, and the combined data norm.

H^s on an interval is ambiguous up to equivalent norms; this module fixes one
computable surrogate for all indices: extend the samples to a periodic signal
on a 4x super-interval (even reflection at both edges, blended to zero with a
C^2 window, with a zero gap between the blends) and weigh the extension's
Fourier modes with (1 + |xi|^2)^s.  The result is normalized so that s = 0
reproduces the L^2 norm exactly; only ratios and monotonicity in s are
meaningful, never absolute equivalence constants.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, UnsupportedIndexError
from .grids import Field, quadrature_weights

__all__ = ["SobolevIndex", "check_index", "hs_norm", "hs_norm_samples", "data_norm"]

SobolevIndex = float

_S_MIN, _S_MAX = -1.0, 6.0


def check_index(s: float) -> float:
    s = float(s)
    if not (_S_MIN <= s <= _S_MAX):
        raise UnsupportedIndexError(f"Sobolev index {s} outside supported range [-1, 6]")
    return s


def _smootherstep(t: np.ndarray) -> np.ndarray:
    """C^2 ramp: 0 -> 1 on [0, 1] with vanishing first two derivatives at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 + t * (-15.0 + 6.0 * t))


def periodic_extension(values: np.ndarray, dx: float) -> np.ndarray:
    """Periodic extension of interval samples to a 4x super-interval.

    Layout on [0, 4L): the signal on [0, L], its windowed even reflection on
    [L, 2L], a zero gap on [2L, 3L], and the windowed reflection from the left
    edge on [3L, 4L).  Reflection keeps the padding amplitude bounded by the
    signal amplitude; the C^2 window makes the periodic junctions smooth.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    span = dx * (n - 1)
    n_seg = n - 1
    ext = np.zeros(4 * n_seg)
    ext[:n] = values
    y = dx * np.arange(1, n_seg)  # offsets into (0, L)
    window = 1.0 - _smootherstep(y / span)
    # right edge: e(L + y) = f(L - y) * w(y)
    ext[n : n + n_seg - 1] = values[::-1][1:n_seg] * window
    # left edge: e(-y) = f(y) * w(y), wrapped to [3L, 4L)
    ext[3 * n_seg + 1 :] = (values[1:n_seg] * window)[::-1]
    return ext


def hs_norm_samples(values: np.ndarray, dx: float, s: float) -> float:
    """Surrogate H^s norm of uniform samples on an interval of spacing dx."""
    s = check_index(s)
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 16:
        raise InvalidArgumentError("need a 1-d signal with at least 16 samples")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("signal contains non-finite entries")
    w = quadrature_weights(len(values), dx)
    l2 = float(np.sqrt(w @ values**2))
    if l2 == 0.0:
        return 0.0
    ext = periodic_extension(values, dx)
    coeffs = np.fft.rfft(ext)
    power = np.abs(coeffs) ** 2
    # rfft folds conjugate modes: double interior bins to match the full spectrum
    power[1:] *= 2.0
    if len(ext) % 2 == 0:
        power[-1] *= 0.5
    xi = 2.0 * np.pi * np.fft.rfftfreq(len(ext), d=dx)
    weights = (1.0 + xi**2) ** s
    ratio = np.sqrt(float(power @ weights) / float(np.sum(power)))
    return l2 * ratio


def hs_norm(f: Field, s: float) -> float:
    """Surrogate H^s(0, L) norm of a Field; equals l2_norm(f) at s = 0."""
    return hs_norm_samples(f.values, f.grid.dx, s)


def data_norm(phi: Field, h, s: float, T: float) -> float:
    """Size of the data pair: initial field plus the three boundary signals.

    The boundary components are measured with indices (s+1)/3, s/3, (s-1)/3
    on [0, T], matching the regularity ladder of the three trace conditions.
    """
    s = float(s)
    check_index(s)
    for comp in ((s + 1.0) / 3.0, s / 3.0, (s - 1.0) / 3.0):
        check_index(comp)
    dt = T / (len(h.h1) - 1)
    total = hs_norm(phi, s)
    total += hs_norm_samples(h.h1, dt, (s + 1.0) / 3.0)
    total += hs_norm_samples(h.h2, dt, s / 3.0)
    total += hs_norm_samples(h.h3, dt, (s - 1.0) / 3.0)
    return total

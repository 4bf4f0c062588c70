"""Characteristic roots of s + lambda + lambda^3 = 0 and the Cramer algebra.

The boundary-forcing solution operator needs, along the curve
s = i(rho^3 - rho), the three roots lambda_j^+(rho), the 3x3 system matrix
built from them, and the determinant ratios obtained by replacing one column
with a unit vector.  The exponentials e^{lambda_j} grow like e^{sqrt(3)rho/2},
so all ratio evaluation here is organized around the identity
e^{lambda_1 + lambda_2 + lambda_3} = 1, which keeps every intermediate bounded
for arbitrarily large rho.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalError, InvalidArgumentError, OutOfRangeError, SingularFrequencyError

__all__ = [
    "RootTriple",
    "RatioMatrix",
    "char_roots",
    "lambda_plus",
    "lambda_plus_arrays",
    "system_matrix",
    "delta_ratios",
    "delta_ratios_matrix_path",
    "boundary_kernels",
    "ratio_log_abs",
    "delta_magnitude_scan",
    "fit_ratio_asymptotics",
    "EXPECTED_DECAY",
    "EXPECTED_POLY",
    "dump_ratios_csv",
]

_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class RootTriple:
    """The three roots of s + lambda + lambda^3 = 0 in canonical order.

    lambda1 is the (nearly) purely imaginary branch; lambda2 has the larger
    real part of the remaining two.  rho is set when the triple comes from
    the s = i(rho^3 - rho) parametrization.
    """

    lambda1: complex
    lambda2: complex
    lambda3: complex
    s: complex
    rho: float | None = None

    def __post_init__(self) -> None:
        tol = _RESIDUAL_TOL * max(1.0, abs(self.s))
        for lam in (self.lambda1, self.lambda2, self.lambda3):
            res = abs(self.s + lam + lam**3)
            if not res <= tol:
                raise InternalError(
                    f"root residual {res:.3e} exceeds {tol:.3e} for s={self.s!r}"
                )

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3])

    def residuals(self) -> np.ndarray:
        lam = self.as_array()
        return np.abs(self.s + lam + lam**3)


@dataclass(frozen=True)
class RatioMatrix:
    """entries[j-1][m-1] = Delta^+_{j,m}(rho) / Delta^+(rho)."""

    entries: np.ndarray
    rho: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (3, 3):
            raise InvalidArgumentError("ratio matrix must be 3x3")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidArgumentError("ratio matrix has non-finite entries")
        object.__setattr__(self, "entries", arr)


def _canonical_order(roots: np.ndarray) -> np.ndarray:
    """lambda1 = branch closest to the imaginary axis (ties: largest Im),
    lambda2 = larger real part of the rest (ties: largest Im)."""
    scale = max(1.0, float(np.max(np.abs(roots))))
    re = np.real(roots).copy()
    re[np.abs(re) <= 1e-10 * scale] = 0.0
    order1 = np.lexsort((-np.imag(roots), np.abs(re)))
    first = roots[order1[0]]
    rest = roots[order1[1:]]
    re_rest = re[order1[1:]]
    order2 = np.lexsort((-np.imag(rest), -re_rest))
    return np.array([first, rest[order2[0]], rest[order2[1]]])


def char_roots(s: complex) -> RootTriple:
    """Solve the characteristic cubic for any finite complex s.

    Companion-matrix roots polished by Newton iteration to residual
    <= 1e-12 * max(1, |s|).
    """
    s = complex(s)
    if not np.isfinite(s.real) or not np.isfinite(s.imag):
        raise InvalidArgumentError("s must be finite")
    roots = np.roots([1.0, 0.0, 1.0, s])
    tol = _RESIDUAL_TOL * max(1.0, abs(s))
    for _ in range(6):
        res = roots**3 + roots + s
        if np.all(np.abs(res) <= 0.25 * tol):
            break
        dres = 3.0 * roots**2 + 1.0
        safe = np.abs(dres) > 1e-30
        step = np.where(safe, res / np.where(safe, dres, 1.0), 0.0)
        better = roots - step
        improved = np.abs(better**3 + better + s) <= np.abs(res)
        roots = np.where(improved, better, roots)
    if np.any(np.abs(roots**3 + roots + s) > tol):
        raise InternalError(f"root polishing failed for s={s!r}")
    lam = _canonical_order(roots)
    return RootTriple(complex(lam[0]), complex(lam[1]), complex(lam[2]), s)


def lambda_plus_arrays(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form roots along s = i(rho^3 - rho) for array rho > 1.

    The square root of 3 rho^2 - 4 uses the principal complex branch, which
    keeps lambda2, lambda3 continuous across rho = 2/sqrt(3).
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 1.0):
        raise OutOfRangeError("lambda_plus requires rho > 1")
    root = np.sqrt((3.0 * rho**2 - 4.0).astype(complex))
    lam1 = 1j * rho
    lam2 = (root - 1j * rho) / 2.0
    lam3 = (-root - 1j * rho) / 2.0
    return lam1, lam2, lam3


def lambda_plus(rho: float) -> RootTriple:
    """Closed-form root triple at a single rho > 1."""
    lam1, lam2, lam3 = lambda_plus_arrays(np.array([float(rho)]))
    s = 1j * (rho**3 - rho)
    return RootTriple(complex(lam1[0]), complex(lam2[0]), complex(lam3[0]), s, rho=float(rho))


def system_matrix(roots: RootTriple) -> np.ndarray:
    """Cramer system matrix with rows (1,1,1), (lam_j e^{lam_j}), (lam_j^2 e^{lam_j})."""
    lam = roots.as_array()
    e = np.exp(lam)
    return np.vstack([np.ones(3, dtype=complex), lam * e, lam**2 * e])


# ---------------------------------------------------------------------------
# Scaled cofactor algebra
#
# With sigma = e^{lambda3} and e^{lambda1+lambda2+lambda3} = 1, every scaled
# minor sigma*M and sigma*Delta is a short sum of terms c * e^p whose
# exponents have non-positive real part for rho > 1.
# ---------------------------------------------------------------------------

def _scaled_terms(lam1, lam2, lam3):
    """Terms (c, p) of sigma*Delta and of each scaled minor sigma*M[r][c]."""
    zero = np.zeros_like(lam1)
    minors = {
        (1, 1): [(lam2 * lam3 * (lam3 - lam2), lam3 - lam1)],
        (1, 2): [(lam1 * lam3 * (lam3 - lam1), lam3 - lam2)],
        (1, 3): [(lam1 * lam2 * (lam2 - lam1), zero)],
        (2, 1): [(lam3**2, 2 * lam3), (-(lam2**2), -lam1)],
        (2, 2): [(lam3**2, 2 * lam3), (-(lam1**2), -lam2)],
        (2, 3): [(lam2**2, -lam1), (-(lam1**2), -lam2)],
        (3, 1): [(lam3, 2 * lam3), (-lam2, -lam1)],
        (3, 2): [(lam3, 2 * lam3), (-lam1, -lam2)],
        (3, 3): [(lam2, -lam1), (-lam1, -lam2)],
    }
    delta = [
        (lam2 * lam3 * (lam3 - lam2), lam3 - lam1),
        (-(lam1 * lam3 * (lam3 - lam1)), lam3 - lam2),
        (lam1 * lam2 * (lam2 - lam1), zero),
    ]
    return delta, minors


def _eval_terms(terms) -> np.ndarray:
    return sum(c * np.exp(p) for c, p in terms)


def _term_scale(terms) -> np.ndarray:
    return np.max([np.abs(c) * np.exp(np.real(p)) for c, p in terms], axis=0)


def _scaled_delta(rho: np.ndarray):
    lam1, lam2, lam3 = lambda_plus_arrays(rho)
    delta_terms, minor_terms = _scaled_terms(lam1, lam2, lam3)
    return lam1, lam2, lam3, _eval_terms(delta_terms), _term_scale(delta_terms), minor_terms


def delta_ratios(rho: float) -> RatioMatrix:
    """Determinant ratios by unit-vector column replacement at one rho > 1.

    Computed in the scaled cofactor form (no overflow for any rho); raises
    if the characteristic determinant is numerically zero there.
    """
    arr = np.array([float(rho)])
    _, _, _, delta, scale, minors = _scaled_delta(arr)
    if abs(delta[0]) < 1e-13 * scale[0]:
        raise SingularFrequencyError(float(rho), abs(delta[0]), float(scale[0]))
    entries = np.empty((3, 3), dtype=complex)
    for j in range(1, 4):
        for m in range(1, 4):
            val = _eval_terms(minors[(m, j)])[0]
            entries[j - 1, m - 1] = ((-1.0) ** (j + m)) * val / delta[0]
    return RatioMatrix(entries, float(rho))


def delta_ratios_matrix_path(rho: float) -> RatioMatrix:
    """Literal path for cross-checks: build the matrix, replace columns,
    take numpy determinants.  Overflows for rho beyond ~800."""
    triple = lambda_plus(float(rho))
    a = system_matrix(triple)
    det = np.linalg.det(a)
    entries = np.empty((3, 3), dtype=complex)
    for j in range(3):
        for m in range(3):
            mod = a.copy()
            col = np.zeros(3, dtype=complex)
            col[m] = 1.0
            mod[:, j] = col
            entries[j, m] = np.linalg.det(mod) / det
    return RatioMatrix(entries, float(rho))


def boundary_kernels(rho: np.ndarray) -> np.ndarray:
    """Bounded kernels B[j-1, m-1] for the boundary integrals.

    B_{j,m} = (Delta_{j,m}/Delta) e^{lambda_j} for j = 1, 2 (the factor that
    pairs with the decaying e^{-lambda_j (1-x)}), and the bare ratio for
    j = 3 (paired with e^{lambda_3 x}).  All combinations stay bounded as
    rho grows; evaluation is vectorized over rho.
    """
    rho = np.asarray(rho, dtype=float)
    lam1, lam2, lam3, delta, scale, minors = _scaled_delta(rho)
    bad = np.abs(delta) < 1e-13 * scale
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SingularFrequencyError(float(rho[idx]), float(np.abs(delta[idx])), float(scale[idx]))
    extra = {1: lam1, 2: lam2, 3: np.zeros_like(lam1)}
    out = np.empty((3, 3) + rho.shape, dtype=complex)
    for j in range(1, 4):
        for m in range(1, 4):
            val = sum(c * np.exp(p + extra[j]) for c, p in minors[(m, j)])
            out[j - 1, m - 1] = ((-1.0) ** (j + m)) * val / delta
    return out


def _log_abs_sum(terms) -> np.ndarray:
    """log | sum_i c_i e^{p_i} | evaluated without overflow or underflow."""
    tops = np.array([np.real(p) + np.log(np.maximum(np.abs(c), 1e-300)) for c, p in terms])
    m = np.max(tops, axis=0)
    inner = sum(c * np.exp(p - m) for c, p in terms)
    with np.errstate(divide="ignore"):
        return m + np.log(np.abs(inner))


def ratio_log_abs(rho: np.ndarray) -> np.ndarray:
    """log |Delta_{j,m}/Delta| as an array of shape (3, 3, len(rho)).

    Fully log-scaled so that entries decaying like e^{-sqrt(3) rho} remain
    measurable far beyond the double-precision underflow threshold.
    """
    rho = np.asarray(rho, dtype=float)
    lam1, lam2, lam3 = lambda_plus_arrays(rho)
    delta_terms, minor_terms = _scaled_terms(lam1, lam2, lam3)
    log_delta = _log_abs_sum(delta_terms)
    out = np.empty((3, 3, rho.size))
    for j in range(1, 4):
        for m in range(1, 4):
            out[j - 1, m - 1] = _log_abs_sum(minor_terms[(m, j)]) - log_delta
    return out


def delta_magnitude_scan(rho_values: np.ndarray, threshold: float = 1e-10) -> list[float]:
    """Scan |Delta| (scaled) against its term magnitudes; return suspicious rho.

    The analysis gives no account of possible zeros of Delta^+ on (1, inf),
    so quadrature callers pre-scan and split panels around any dip."""
    rho_values = np.asarray(rho_values, dtype=float)
    _, _, _, delta, scale, _ = _scaled_delta(rho_values)
    mask = np.abs(delta) < threshold * scale
    return [float(r) for r in rho_values[mask]]


# expected large-rho laws, indexed [j-1, m-1]: |ratio| ~ rho^poly * exp(decay * rho)
EXPECTED_DECAY = np.array(
    [
        [-np.sqrt(3.0) / 2.0, 0.0, 0.0],
        [-np.sqrt(3.0), -np.sqrt(3.0) / 2.0, -np.sqrt(3.0) / 2.0],
        [0.0, 0.0, 0.0],
    ]
)
EXPECTED_POLY = np.array(
    [
        [0.0, -1.0, -2.0],
        [0.0, -1.0, -2.0],
        [0.0, -1.0, -2.0],
    ]
)


def fit_ratio_asymptotics(
    rho_min: float = 50.0, rho_max: float = 500.0, count: int = 160
) -> tuple[np.ndarray, np.ndarray]:
    """Regress log|ratio| = a rho + b log rho + c over [rho_min, rho_max].

    Returns (decay, poly): 3x3 arrays of fitted a and b per (j, m) entry.
    """
    rho = np.geomspace(rho_min, rho_max, count)
    logs = ratio_log_abs(rho)
    design = np.vstack([rho, np.log(rho), np.ones_like(rho)]).T
    decay = np.empty((3, 3))
    poly = np.empty((3, 3))
    for j in range(3):
        for m in range(3):
            coef, *_ = np.linalg.lstsq(design, logs[j, m], rcond=None)
            decay[j, m], poly[j, m] = coef[0], coef[1]
    return decay, poly


def dump_ratios_csv(path: str, rho_values: np.ndarray) -> None:
    """Diagnostic table of log|Delta_{j,m}/Delta| against rho."""
    rho_values = np.asarray(rho_values, dtype=float)
    logs = ratio_log_abs(rho_values)
    with open(path, "w") as fh:
        header = "rho," + ",".join(f"log_abs_r{j}{m}" for j in range(1, 4) for m in range(1, 4))
        fh.write(header + "\n")
        for i, r in enumerate(rho_values):
            row = ",".join("%.17g" % logs[j, m, i] for j in range(3) for m in range(3))
            fh.write("%.17g,%s\n" % (r, row))

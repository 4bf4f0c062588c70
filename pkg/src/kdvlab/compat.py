"""Compatibility recursion and the s-compatibility verdict.

A smooth solution forces algebraic links between the initial field and the
boundary signals at the corner t = 0: the recursion

    phi_0 = phi,
    phi_k = -( phi_{k-1}''' + phi_{k-1}' + sum_{j=0}^{k-1} (phi_j phi_{k-1-j})' )

gives the time derivatives of the solution at t = 0, which must match the
time derivatives of the boundary data.  Which equalities apply, and up to
which k, depends only on the fractional part r = s - 3 floor(s/3):

    r <= 1/2        : phi_k(0) = h1^(k)(0)                   for k <= floor(s/3) - 1
    1/2 < r < 3/2   : ... and phi_k'(L) = h2^(k)(0)          for k <= floor(s/3)
    r >= 3/2        : ... and phi_k''(L) = h3^(k)(0)         for k <= floor(s/3) + 1

The first clause is vacuous when floor(s/3) - 1 < 0.  At the boundary value
r = 3/2 both middle and last clauses formally apply; the stronger one is used.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .boundary_data import BoundaryTriple
from .errors import AccuracyWarning, InvalidArgumentError, NotApplicableError
from .grids import Field, differentiate

__all__ = ["CompatVerdict", "CheckRecord", "phi_k", "phi_sequence", "check_compat"]


@dataclass(frozen=True)
class CheckRecord:
    k: int
    condition: str
    lhs: float
    rhs: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.tolerance


@dataclass(frozen=True)
class CompatVerdict:
    compatible: bool
    checked: tuple[CheckRecord, ...]
    regime: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "compatible": self.compatible,
                "regime": self.regime,
                "checked": [
                    {
                        "k": c.k,
                        "condition": c.condition,
                        "lhs": c.lhs,
                        "rhs": c.rhs,
                        "tolerance": c.tolerance,
                        "passed": c.passed,
                    }
                    for c in self.checked
                ],
            },
            indent=1,
            sort_keys=True,
        )


def phi_sequence(phi: Field, kmax: int) -> list[Field]:
    """phi_0 .. phi_kmax by the numeric recursion on the grid."""
    if kmax < 0:
        raise InvalidArgumentError("kmax must be >= 0")
    n = phi.grid.n
    if 3 * kmax >= math.log2(n):
        warnings.warn(
            f"phi_{kmax} needs {3 * kmax} numeric derivatives on {n} nodes; "
            "stencil noise may dominate",
            AccuracyWarning,
        )
    seq = [phi]
    for k in range(1, kmax + 1):
        acc = differentiate(seq[k - 1], 3).values + differentiate(seq[k - 1], 1).values
        for j in range(k):
            prod = Field(phi.grid, seq[j].values * seq[k - 1 - j].values)
            acc = acc + differentiate(prod, 1).values
        seq.append(Field(phi.grid, -acc))
    return seq


def phi_k(phi: Field, k: int) -> Field:
    """The k-th field of the compatibility recursion."""
    return phi_sequence(phi, k)[k]


def _signal_derivative_at_zero(samples: np.ndarray, dt: float, k: int) -> float:
    """One-sided derivative estimates at t = 0 (4-point for k = 1)."""
    s = np.asarray(samples, dtype=float)
    if k == 0:
        return float(s[0])
    if k == 1:
        return float((-11.0 * s[0] + 18.0 * s[1] - 9.0 * s[2] + 2.0 * s[3]) / (6.0 * dt))
    if k == 2:
        return float((2.0 * s[0] - 5.0 * s[1] + 4.0 * s[2] - s[3]) / dt**2)
    if k == 3:
        return float(
            (-2.5 * s[0] + 9.0 * s[1] - 12.0 * s[2] + 7.0 * s[3] - 1.5 * s[4]) / dt**3
        )
    raise InvalidArgumentError(f"boundary-derivative order {k} not supported")


def check_compat(
    phi: Field,
    h: BoundaryTriple,
    s: float,
    h_derivatives: Sequence[Callable[[int], float]] | None = None,
    rel_tol: float = 1e-6,
) -> CompatVerdict:
    """s-compatibility verdict for the data pair (phi, h).

    h_derivatives, when given, supplies analytic values h_j^(k)(0) as three
    callables indexed j = 1, 2, 3; otherwise one-sided stencils on the time
    samples are used.  Raises NotApplicableError for s < 0, where the theory
    imposes no compatibility.
    """
    s = float(s)
    if s < 0:
        raise NotApplicableError("no compatibility conditions apply for s < 0")

    kfloor = int(math.floor(s / 3.0))
    r = s - 3.0 * kfloor

    if r <= 0.5:
        regime, kmax = "comp1", kfloor - 1
    elif r < 1.5:
        regime, kmax = "comp2", kfloor
    else:
        # at r = 3/2 both clauses formally apply; use the stronger one
        regime, kmax = "comp3", kfloor + 1

    if kmax < 0:
        return CompatVerdict(True, (), regime)

    def h_deriv(j: int, k: int) -> float:
        if h_derivatives is not None:
            return float(h_derivatives[j - 1](k))
        chan = (h.h1, h.h2, h.h3)[j - 1]
        return _signal_derivative_at_zero(chan, h.tgrid.dt, k)

    seq = phi_sequence(phi, kmax)
    records: list[CheckRecord] = []
    for k in range(kmax + 1):
        pk = seq[k]
        pairs = [("comp_h1", float(pk.values[0]), h_deriv(1, k))]
        if regime in ("comp2", "comp3"):
            pairs.append(("comp_h2", float(differentiate(pk, 1).values[-1]), h_deriv(2, k)))
        if regime == "comp3":
            pairs.append(("comp_h3", float(differentiate(pk, 2).values[-1]), h_deriv(3, k)))
        for name, lhs, rhs in pairs:
            tol = rel_tol * max(1.0, abs(lhs), abs(rhs))
            records.append(CheckRecord(k, name, lhs, rhs, tol))

    return CompatVerdict(all(c.passed for c in records), tuple(records), regime)

import numpy as np
import pytest
import sympy as sp

from kdvlab.boundary_data import BoundaryTriple
from kdvlab.compat import check_compat, phi_k, phi_sequence
from kdvlab.errors import AccuracyWarning, NotApplicableError
from kdvlab.grids import Field, TimeGrid, make_grid


def _symbolic_sequence(expr, kmax):
    """Ground-truth recursion by symbolic differentiation."""
    x = sp.Symbol("x")
    seq = [expr]
    for k in range(1, kmax + 1):
        acc = sp.diff(seq[k - 1], x, 3) + sp.diff(seq[k - 1], x, 1)
        for j in range(k):
            acc += sp.diff(seq[j] * seq[k - 1 - j], x, 1)
        seq.append(sp.expand(-acc))
    return seq, x


def test_zero_field_stays_zero():
    g = make_grid(1.0, 65)
    for f in phi_sequence(Field.zeros(g), 2):
        assert np.max(np.abs(f.values)) == 0.0


def test_phi1_of_identity():
    g = make_grid(1.0, 129)
    f = Field.from_callable(g, lambda x: x)
    p1 = phi_k(f, 1)
    assert np.max(np.abs(p1.values + (1.0 + 2.0 * g.nodes))) < 1e-10


def test_phi2_of_identity_against_symbolic_oracle():
    g = make_grid(1.0, 129)
    f = Field.from_callable(g, lambda x: x)
    seq, x = _symbolic_sequence(sp.Symbol("x"), 2)
    exact = np.broadcast_to(sp.lambdify(x, seq[2], "numpy")(g.nodes), (g.n,))
    p2 = phi_k(f, 2)
    scale = max(1.0, np.max(np.abs(exact)))
    assert np.max(np.abs(p2.values - exact)) < 1e-6 * scale


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_recursion_matches_symbolic_on_random_polynomials(seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=7)  # degree <= 6
    x = sp.Symbol("x")
    expr = sum(sp.Rational(int(round(c * 64)), 64) * x**i for i, c in enumerate(coeffs))
    seq, _ = _symbolic_sequence(expr, 2)
    g = make_grid(1.0, 257)
    f = Field(g, sp.lambdify(x, expr, "numpy")(g.nodes) * np.ones(g.n))
    numeric = phi_sequence(f, 2)
    for k in (1, 2):
        exact = sp.lambdify(x, seq[k], "numpy")(g.nodes) * np.ones(g.n)
        scale = max(1.0, float(np.max(np.abs(exact))))
        assert np.max(np.abs(numeric[k].values - exact)) < 1e-6 * scale


def test_accuracy_warning_for_deep_recursion():
    g = make_grid(1.0, 16)
    with pytest.warns(AccuracyWarning):
        phi_k(Field.zeros(g), 2)  # 3k = 6 >= log2(16) = 4


def test_vacuous_at_s_zero():
    g = make_grid(1.0, 65)
    tg = TimeGrid(1.0, 32)
    rng = np.random.default_rng(1)
    phi = Field(g, rng.normal(size=65))
    h = BoundaryTriple(rng.normal(size=33), rng.normal(size=33), rng.normal(size=33), tg)
    verdict = check_compat(phi, h, 0.0)
    assert verdict.compatible and verdict.checked == () and verdict.regime == "comp1"


def test_s1_identity_field_compatible():
    g = make_grid(1.0, 129)
    tg = TimeGrid(1.0, 32)
    phi = Field.from_callable(g, lambda x: x)
    h = BoundaryTriple(np.zeros(33), np.ones(33), np.zeros(33), tg)
    verdict = check_compat(phi, h, 1.0)
    assert verdict.compatible
    assert verdict.regime == "comp2"
    assert {c.condition for c in verdict.checked} == {"comp_h1", "comp_h2"}


def test_s1_violated_with_witness():
    g = make_grid(1.0, 129)
    tg = TimeGrid(1.0, 32)
    phi = Field.from_callable(g, lambda x: x)
    h = BoundaryTriple(np.full(33, 0.5), np.ones(33), np.zeros(33), tg)
    verdict = check_compat(phi, h, 1.0)
    assert not verdict.compatible
    bad = [c for c in verdict.checked if not c.passed]
    assert len(bad) == 1
    witness = bad[0]
    assert witness.k == 0 and witness.condition == "comp_h1"
    assert witness.lhs == pytest.approx(0.0, abs=1e-12)
    assert witness.rhs == pytest.approx(0.5)
    assert verdict.regime == "comp2"


@pytest.mark.parametrize(
    "s,regime,n_checks",
    [(0.0, "comp1", 0), (1.0, "comp2", 2), (2.0, "comp3", 6), (3.2, "comp1", 1), (4.6, "comp3", 9)],
)
def test_regime_dispatch(s, regime, n_checks):
    # hand-traced from r = s - 3 floor(s/3): r <= 1/2 -> first clause up to
    # floor(s/3) - 1; 1/2 < r < 3/2 -> second clause up to floor(s/3);
    # r >= 3/2 -> third clause up to floor(s/3) + 1
    g = make_grid(1.0, 257)
    tg = TimeGrid(1.0, 32)
    phi = Field.from_callable(g, lambda x: np.sin(np.pi * x) * x**2 * (1 - x) ** 2)
    verdict = check_compat(phi, BoundaryTriple.zeros(tg), s)
    assert verdict.regime == regime
    assert len(verdict.checked) == n_checks


def test_regime_depends_only_on_s():
    g = make_grid(1.0, 65)
    tg = TimeGrid(1.0, 32)
    rng = np.random.default_rng(9)
    regimes = set()
    for _ in range(5):
        phi = Field(g, rng.normal(size=65))
        h = BoundaryTriple(rng.normal(size=33), rng.normal(size=33), rng.normal(size=33), tg)
        regimes.add(check_compat(phi, h, 2.0).regime)
    assert regimes == {"comp3"}


def test_boundary_value_r_three_halves_uses_stronger_clause():
    g = make_grid(1.0, 65)
    tg = TimeGrid(1.0, 32)
    verdict = check_compat(Field.zeros(g), BoundaryTriple.zeros(tg), 1.5)
    assert verdict.regime == "comp3"


def test_perturbation_flips_verdict_exactly_at_tolerance():
    g = make_grid(1.0, 129)
    phi = Field.from_callable(g, lambda x: x)
    tg = TimeGrid(1.0, 32)

    def verdict_for(delta):
        h = BoundaryTriple(np.full(33, delta), np.ones(33), np.zeros(33), tg)
        derivs = [lambda k, d=delta: d if k == 0 else 0.0,
                  lambda k: 1.0 if k == 0 else 0.0,
                  lambda k: 0.0]
        return check_compat(phi, h, 1.0, h_derivatives=derivs)

    assert verdict_for(0.5e-6).compatible
    assert not verdict_for(2.0e-6).compatible


def test_not_applicable_below_zero():
    g = make_grid(1.0, 65)
    tg = TimeGrid(1.0, 32)
    with pytest.raises(NotApplicableError):
        check_compat(Field.zeros(g), BoundaryTriple.zeros(tg), -0.5)


def test_verdict_json():
    import json

    g = make_grid(1.0, 129)
    tg = TimeGrid(1.0, 32)
    phi = Field.from_callable(g, lambda x: x)
    h = BoundaryTriple(np.zeros(33), np.ones(33), np.zeros(33), tg)
    doc = json.loads(check_compat(phi, h, 1.0).to_json())
    assert doc["compatible"] is True
    assert doc["regime"] == "comp2"
    assert all(rec["passed"] for rec in doc["checked"])

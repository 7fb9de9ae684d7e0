import random
from fractions import Fraction

import numpy as np
import pytest

from foliation_lab.algebra import (
    ONE,
    X,
    Y,
    ZERO,
    BivariatePolynomial,
    GaussianRational,
    RationalFunction,
)
from foliation_lab.forms import (
    DivisorComponent,
    FormValidationError,
    MeromorphicOneForm,
    compute_omega1,
    curve_invariant,
    leafwise_pole_data,
    split_divisors,
)

RF = RationalFunction


def form(p, q):
    return MeromorphicOneForm(RF.of(p), RF.of(q))


def random_rational(rng, max_deg=3):
    def rand_poly(allow_zero=True):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            i = rng.randint(0, max_deg)
            j = rng.randint(0, max_deg - i)
            terms[(i, j)] = GaussianRational(
                Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
            )
        p = BivariatePolynomial(terms)
        if p.is_zero() and not allow_zero:
            return ONE
        return p

    return RF(rand_poly(), rand_poly(allow_zero=False))


def test_omega1_of_x_dy():
    w = form(ZERO, X)
    o1 = compute_omega1(w)
    assert o1.coeff_dx == RF(-ONE, X)
    assert o1.coeff_dy.is_zero()
    assert o1.wedge_defect(w).is_zero()


def test_omega1_closed_form_is_zero():
    w = form(ZERO, ONE)  # dy
    o1 = compute_omega1(w)
    assert o1.coeff_dx.is_zero() and o1.coeff_dy.is_zero()


def test_omega1_linear_siegel_restriction():
    # 2u dv + v du; on {v=0} the representative is -1/(2u) du
    w = form(Y, X.scale(2))
    o1 = compute_omega1(w)
    assert o1.coeff_dx == RF(ONE.scale(-1), X.scale(2))
    assert o1.wedge_defect(w).is_zero()


def test_omega1_identity_random_forms():
    rng = random.Random(17)
    checked = 0
    for _ in range(60):
        p, q = random_rational(rng), random_rational(rng)
        if p.is_zero() and q.is_zero():
            continue
        w = form(p, q)
        o1 = compute_omega1(w)
        assert o1.wedge_defect(w).is_zero()
        checked += 1
    assert checked >= 50


def test_gauge_independence_on_tangent_vectors():
    rng = random.Random(29)
    w = form(Y * Y - 1, X * X + X * Y + 2)
    o1 = compute_omega1(w)
    rho = random_rational(rng)
    shifted = type(o1)(
        coeff_dx=o1.coeff_dx + rho * w.coeff_dx,
        coeff_dy=o1.coeff_dy + rho * w.coeff_dy,
        gauge_note="shifted by rho*w",
    )
    assert shifted.wedge_defect(w).is_zero()
    for _ in range(12):
        pt = (rng.uniform(0.5, 2), rng.uniform(0.5, 2))
        try:
            yvec = w.tangent_at(pt)
            a = o1.value_on(pt, yvec)
            b = shifted.value_on(pt, yvec)
        except ArithmeticError:
            continue
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_curve_invariant_separatrices():
    w = form(-Y, X.scale(2))  # 2x dy - y dx
    assert curve_invariant(w, X)
    assert curve_invariant(w, Y)
    radial = form(-Y, X)
    assert curve_invariant(radial, X - Y)
    assert not curve_invariant(form(ZERO, ONE), X)


def test_curve_invariant_strips_divisor_factor():
    # w = x dy defines the horizontal foliation; {x=0} is transverse
    w = form(ZERO, X)
    assert not curve_invariant(w, X)
    assert curve_invariant(w, Y - 1)


def test_curve_invariant_rejects_constant():
    with pytest.raises(FormValidationError):
        curve_invariant(form(ZERO, X), ONE)


def test_split_divisors_routing():
    w = form(ZERO, X)  # zero divisor {x=0}, not invariant
    comp = DivisorComponent(X, 1, False)
    split = split_divisors(w, [comp])
    assert split.zero_perp == [comp]
    assert not split.zero_fol and not split.pole_fol and not split.pole_perp


def test_split_divisors_invariant_zero_component():
    w = MeromorphicOneForm(RF(-Y * Y), RF(X * Y))  # y*(x dy - y dx)
    comp = DivisorComponent(Y, 1, True)
    split = split_divisors(w, [comp])
    assert split.zero_fol == [comp]


def test_split_divisors_empty():
    split = split_divisors(form(ZERO, X), [])
    assert split.zero_fol == [] and split.zero_perp == []
    assert split.pole_fol == [] and split.pole_perp == []


def test_split_divisors_validates_multiplicity():
    w = form(ZERO, X)
    bad = DivisorComponent(X, 2, False)
    with pytest.raises(FormValidationError):
        split_divisors(w, [bad])


def test_split_divisors_validates_flag():
    w = form(ZERO, X)
    bad = DivisorComponent(X, 1, True)
    with pytest.raises(FormValidationError):
        split_divisors(w, [bad])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_leafwise_residue_zero_component(m):
    w = form(ZERO, X**m)
    o1 = compute_omega1(w)
    comp = DivisorComponent(X, m, False)
    data = leafwise_pole_data(w, o1, comp, (0, 5))
    assert data.pole_order == 1
    assert data.expected_residue == -m
    assert abs(data.residue - (-m)) < 1e-8


@pytest.mark.parametrize("m", [1, 2])
def test_leafwise_residue_pole_component(m):
    w = MeromorphicOneForm(RF.of(ZERO), RF(ONE, X**m))
    o1 = compute_omega1(w)
    comp = DivisorComponent(X, -m, False)
    data = leafwise_pole_data(w, o1, comp, (0, 2))
    assert data.expected_residue == m
    assert abs(data.residue - m) < 1e-8


def test_leafwise_residue_wrong_point():
    w = form(ZERO, X)
    o1 = compute_omega1(w)
    comp = DivisorComponent(X, 1, False)
    with pytest.raises(FormValidationError):
        leafwise_pole_data(w, o1, comp, (1, 0))


def test_not_closed_flag():
    assert form(ZERO, ONE).is_closed
    assert not form(ZERO, X).is_closed
    assert form(Y, X).is_closed  # d(xy)

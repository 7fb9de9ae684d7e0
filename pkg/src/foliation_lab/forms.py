"""Meromorphic 1-forms on a C^2 chart and the induced foliated form.

A form w = P dx + Q dy carries the foliation with tangent field
Y = Q d/dx - P d/dy.  The foliated representative Omega1 solves
dw = w ^ Omega1 exactly in the rational-function ring; its restriction to
leaves is gauge independent and drives every contraction estimate
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .algebra import (
    ONE,
    ZERO,
    BivariatePolynomial,
    RationalFunction,
    extract_factor,
    poly_divide_exact,
)
from .numerics import integrate_ode, segment_integral


class FormValidationError(ValueError):
    pass


@dataclass(frozen=True)
class MeromorphicOneForm:
    """w = P dx + Q dy with rational-function coefficients."""

    coeff_dx: RationalFunction
    coeff_dy: RationalFunction

    def __post_init__(self):
        if self.coeff_dx.is_zero() and self.coeff_dy.is_zero():
            raise FormValidationError("both coefficients of the form vanish")

    @property
    def p(self) -> RationalFunction:
        return self.coeff_dx

    @property
    def q(self) -> RationalFunction:
        return self.coeff_dy

    def curl(self) -> RationalFunction:
        """dQ/dx - dP/dy; dw equals this times dx^dy."""
        return self.coeff_dy.derivative("x") - self.coeff_dx.derivative("y")

    @property
    def is_closed(self) -> bool:
        return self.curl().is_zero()

    def tangent_at(self, point, pole_tol: float = 1e-12) -> complex:
        """Y = (Q, -P) evaluated at a point, packed as a C^2 pair."""
        x, y = complex(point[0]), complex(point[1])
        return np.array(
            [
                self.coeff_dy.eval_complex(x, y, pole_tol),
                -self.coeff_dx.eval_complex(x, y, pole_tol),
            ]
        )

    def reduced_tangent_field(
        self, hints: Iterable[BivariatePolynomial] = ()
    ) -> Tuple[BivariatePolynomial, BivariatePolynomial]:
        """Polynomial pair (Qr, Pr) with Y parallel to Qr d/dx - Pr d/dy.

        Common denominators are cleared and common factors stripped: monomial
        content always, plus any polynomials passed as hints (declared divisor
        components, exceptional curves).  Stripping is what makes tangency
        tests about the foliation rather than about the chosen w.
        """
        pn, pd = self.coeff_dx.num, self.coeff_dx.den
        qn, qd = self.coeff_dy.num, self.coeff_dy.den
        qr = qn * pd
        pr = pn * qd
        if pr.is_zero():
            return ONE, ZERO
        if qr.is_zero():
            return ZERO, ONE
        i0 = min(qr.monomial_content()[0], pr.monomial_content()[0])
        j0 = min(qr.monomial_content()[1], pr.monomial_content()[1])
        qr, pr = qr.divide_by_monomial(i0, j0), pr.divide_by_monomial(i0, j0)
        for h in hints:
            if h.is_constant():
                continue
            while True:
                q2 = poly_divide_exact(qr, h)
                p2 = poly_divide_exact(pr, h)
                if q2 is None or p2 is None:
                    break
                qr, pr = q2, p2
        return qr, pr

    def slope_field(self):
        """dy/dx = -P/Q as a callable of (x, y); used for graph transport."""
        ratio = -self.coeff_dx / self.coeff_dy

        def slope(x: complex, y: complex) -> complex:
            return ratio.eval_complex(x, y)

        return slope

    def pullback(self, x_sub, y_sub, jac_xx, jac_xy, jac_yx, jac_yy) -> "MeromorphicOneForm":
        """Substitute coordinates with the given Jacobian entries.

        For x = X(u, v), y = Y(u, v) the pulled-back coefficients are
        P(X,Y)*dX + Q(X,Y)*dY expanded over du, dv.
        """
        ps = self.coeff_dx.substitute(x_sub, y_sub)
        qs = self.coeff_dy.substitute(x_sub, y_sub)
        new_p = ps * RationalFunction.of(jac_xx) + qs * RationalFunction.of(jac_yx)
        new_q = ps * RationalFunction.of(jac_xy) + qs * RationalFunction.of(jac_yy)
        return MeromorphicOneForm(new_p, new_q)

    def shift(self, cx, cy) -> "MeromorphicOneForm":
        return MeromorphicOneForm(
            self.coeff_dx.shift(cx, cy), self.coeff_dy.shift(cx, cy)
        )

    def __str__(self) -> str:
        return f"({self.coeff_dx}) dx + ({self.coeff_dy}) dy"


@dataclass(frozen=True)
class DivisorComponent:
    """Irreducible curve in the zero/pole divisor of w.

    multiplicity > 0 records order in the zero divisor, < 0 in the pole
    divisor.  The invariant flag is validated, never trusted.
    """

    defining_poly: BivariatePolynomial
    multiplicity: int
    invariant_flag: bool

    def __post_init__(self):
        if self.defining_poly.is_constant():
            raise FormValidationError("divisor component must be nonconstant")
        if self.multiplicity == 0:
            raise FormValidationError("divisor component with zero multiplicity")


@dataclass(frozen=True)
class FoliatedFormRepresentative:
    """One rational representative Omega1 = F dx + G dy of the foliated form.

    Defined modulo multiples of w; only the restriction to leaf tangents is
    intrinsic.  gauge_note records which coefficient was zeroed.
    """

    coeff_dx: RationalFunction
    coeff_dy: RationalFunction
    gauge_note: str

    def value_on(self, point, vector, pole_tol: float = 1e-12) -> complex:
        x, y = complex(point[0]), complex(point[1])
        return self.coeff_dx.eval_complex(x, y, pole_tol) * complex(
            vector[0]
        ) + self.coeff_dy.eval_complex(x, y, pole_tol) * complex(vector[1])

    def on_tangent_field(self, w: MeromorphicOneForm) -> RationalFunction:
        """Omega1(Y) = F*Q - G*P as an exact rational function."""
        return self.coeff_dx * w.coeff_dy - self.coeff_dy * w.coeff_dx

    def wedge_defect(self, w: MeromorphicOneForm) -> RationalFunction:
        """P*G - Q*F - (dQ/dx - dP/dy); identically zero for a valid gauge."""
        return (
            w.coeff_dx * self.coeff_dy
            - w.coeff_dy * self.coeff_dx
            - w.curl()
        )


def compute_omega1(w: MeromorphicOneForm) -> FoliatedFormRepresentative:
    """Solve dw = w ^ Omega1 with the canonical gauge.

    If Q is nonzero the dy-coefficient is gauged away: F = -(dQ/dx - dP/dy)/Q;
    otherwise G = (dQ/dx - dP/dy)/P.  A closed w yields the zero
    representative.
    """
    c = w.curl()
    if not w.coeff_dy.is_zero():
        return FoliatedFormRepresentative(
            -c / w.coeff_dy, RationalFunction.of(0), gauge_note="dy-coefficient gauged to zero"
        )
    return FoliatedFormRepresentative(
        RationalFunction.of(0), c / w.coeff_dx, gauge_note="dx-coefficient gauged to zero"
    )


def curve_invariant(w: MeromorphicOneForm, curve: BivariatePolynomial) -> bool:
    """True when {curve = 0} is tangent to the foliation of w.

    The test is exact: curve divides Qr*dC/dx - Pr*dC/dy for the reduced
    tangent field.  Powers of the curve itself are stripped from (P, Q)
    first, so zero/pole components of w are judged by the underlying
    foliation.
    """
    if curve.is_constant():
        raise FormValidationError("invariance of a constant curve is undefined")
    qr, pr = w.reduced_tangent_field(hints=[curve])
    tangency = qr * curve.derivative("x") - pr * curve.derivative("y")
    if tangency.is_zero():
        return True
    return poly_divide_exact(tangency, curve) is not None


@dataclass
class DivisorSplit:
    zero_fol: List[DivisorComponent]
    zero_perp: List[DivisorComponent]
    pole_fol: List[DivisorComponent]
    pole_perp: List[DivisorComponent]


def component_order(w: MeromorphicOneForm, curve: BivariatePolynomial) -> int:
    """Order of {curve=0} in the divisor of w: min over both coefficients of
    (zero order in numerator) - (pole order in denominator)."""
    orders = []
    for coeff in (w.coeff_dx, w.coeff_dy):
        if coeff.is_zero():
            continue
        up, _ = extract_factor(coeff.num, curve)
        down, _ = extract_factor(coeff.den, curve)
        orders.append(up - down)
    return min(orders)


def split_divisors(
    w: MeromorphicOneForm, components: Iterable[DivisorComponent]
) -> DivisorSplit:
    """Route declared components by invariance, re-validating every claim."""
    out = DivisorSplit([], [], [], [])
    for comp in components:
        actual = component_order(w, comp.defining_poly)
        if actual != comp.multiplicity:
            raise FormValidationError(
                f"component {comp.defining_poly} declared with multiplicity "
                f"{comp.multiplicity} but w carries it with order {actual}"
            )
        inv = curve_invariant(w, comp.defining_poly)
        if inv != comp.invariant_flag:
            raise FormValidationError(
                f"component {comp.defining_poly}: declared invariant_flag="
                f"{comp.invariant_flag} contradicts the tangency test ({inv})"
            )
        if comp.multiplicity > 0:
            (out.zero_fol if inv else out.zero_perp).append(comp)
        else:
            (out.pole_fol if inv else out.pole_perp).append(comp)
    return out


@dataclass
class LeafwisePoleData:
    pole_order: int
    residue: complex
    expected_residue: int
    radius_used: float


def leafwise_pole_data(
    w: MeromorphicOneForm,
    omega1: FoliatedFormRepresentative,
    component: DivisorComponent,
    point,
    loop_radius: float = 1e-3,
    tol: float = 1e-11,
) -> LeafwisePoleData:
    """Contour residue of omega1 restricted to the leaf through a point of a
    non-invariant divisor component.

    The leaf is transported as a graph over the coordinate in which it is
    steepest; the loop encircles the point inside the leaf.  A first-order
    pole with residue -multiplicity (zero components) or +multiplicity
    (pole components) signals a sink or source of the real trajectory
    foliation there.
    """
    if component.invariant_flag:
        raise FormValidationError("leafwise pole data needs a non-invariant component")
    x0, y0 = complex(point[0]), complex(point[1])
    cval = component.defining_poly.eval_complex(x0, y0)
    if abs(cval) > 1e-9:
        raise FormValidationError("point does not lie on the component")
    qr, pr = w.reduced_tangent_field(hints=[component.defining_poly])
    yx = qr.eval_complex(x0, y0)
    yy = -pr.eval_complex(x0, y0)
    if max(abs(yx), abs(yy)) < 1e-12:
        raise FormValidationError("point is singular for the foliation")

    base_is_x = abs(yx) >= abs(yy)

    def residue_at(radius: float) -> complex:
        if base_is_x:
            slope = -w.coeff_dx / w.coeff_dy  # dy/dx
            center, other = x0, y0
        else:
            slope = -w.coeff_dy / w.coeff_dx  # dx/dy
            center, other = y0, x0

        def field_on(path, dpath, accumulate):
            def f(t, state):
                b, v = path(t), state[0]
                pt = (b, v) if base_is_x else (v, b)
                db = dpath(t)
                dv = slope.eval_complex(*pt) * db
                if not accumulate:
                    return np.array([dv])
                vec = (db, dv) if base_is_x else (dv, db)
                return np.array([dv, omega1.value_on(pt, vec)])
            return f

        # radial lead-in to the circle, then once around with the
        # Omega1 integral carried as an extra state component
        lead = integrate_ode(
            field_on(lambda t: center + t * radius, lambda t: radius, False),
            0.0, [other], 1.0, tol=tol,
        )
        if lead.status != "reached_end":
            raise FormValidationError(f"leaf transport failed: {lead.status}")

        def circle(t):
            return center + radius * np.exp(2j * np.pi * t)

        def dcircle(t):
            return radius * 2j * np.pi * np.exp(2j * np.pi * t)

        run = integrate_ode(
            field_on(circle, dcircle, True), 0.0, [lead.y[0], 0.0], 1.0, tol=tol
        )
        if run.status != "reached_end":
            raise FormValidationError(f"leaf loop failed: {run.status}")
        return run.y[1] / (2j * np.pi)

    r1 = residue_at(loop_radius)
    r2 = residue_at(loop_radius / 2)
    if abs(r1 - r2) > 1e-6 * max(1.0, abs(r1)):
        raise FormValidationError(
            f"loop integral not radius-stable ({r1} vs {r2}); pole order != 1?"
        )
    return LeafwisePoleData(
        pole_order=1,
        residue=r1,
        expected_residue=-component.multiplicity,
        radius_used=loop_radius,
    )

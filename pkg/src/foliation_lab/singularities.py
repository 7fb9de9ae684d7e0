"""Singular points of the foliation: location, linear data, taxonomy.

The taxonomy follows the vector-field convention fixed once for the whole
package: eigenvalues are those of the linear part of Y = Q d/dx - P d/dy,
and the Siegel domain means a negative real eigenvalue ratio.  Floating
eigenvalues cannot distinguish rationals from irrationals, so rational
detection runs a continued-fraction scan under a caller-set denominator
bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .algebra import (
    GR_ONE,
    GR_ZERO,
    ONE,
    X,
    Y,
    ZERO,
    BivariatePolynomial,
    GaussianRational,
    RationalFunction,
    poly_divide_exact,
    resultant,
)
from .forms import MeromorphicOneForm
from .numerics import continued_fraction_rational, newton_polish_2d


class SingularityError(RuntimeError):
    pass


class TaxonomyTag(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    SIEGEL = "siegel"
    SADDLE_NODE = "saddle_node"
    IRRATIONAL_FOCUS = "irrational_focus"
    POINCARE_DULAC = "poincare_dulac"
    DICRITICAL_LINEAR = "dicritical_linear"
    DEGENERATE = "degenerate"
    # integer-ratio eigenvalues need jet inspection before they resolve to
    # POINCARE_DULAC or DICRITICAL_LINEAR; classify alone reports this tag
    RESONANT = "resonant"

    @property
    def reduced(self) -> bool:
        return self in (
            TaxonomyTag.HYPERBOLIC,
            TaxonomyTag.SIEGEL,
            TaxonomyTag.SADDLE_NODE,
            TaxonomyTag.IRRATIONAL_FOCUS,
        )


@dataclass
class NumericControls:
    tol: float = 1e-9
    rational_bound: int = 64
    newton_tol: float = 1e-12
    exact_max_den: int = 1000


@dataclass
class ChartRegion:
    """Bounded search window given as moduli bounds on both coordinates."""

    x_max: float = 2.0
    y_max: float = 2.0

    def contains(self, x: complex, y: complex, slack: float = 1e-9) -> bool:
        return abs(x) <= self.x_max + slack and abs(y) <= self.y_max + slack


@dataclass
class SingularityRecord:
    location: Tuple[complex, complex]
    exact_location: Optional[Tuple[GaussianRational, GaussianRational]]
    residual: float
    linear_part: np.ndarray  # 2x2 complex, of the reduced tangent field
    eigenvalues: Tuple[complex, complex]  # |lambda1| >= |lambda2|
    quotient_class: TaxonomyTag
    order: int

    @property
    def is_exact(self) -> bool:
        return self.exact_location is not None


def _linear_part_exact(qr: BivariatePolynomial, pr: BivariatePolynomial):
    """Jacobian of (Qr, -Pr) at the origin as exact entries."""
    return (
        qr.coefficient(1, 0),
        qr.coefficient(0, 1),
        -pr.coefficient(1, 0),
        -pr.coefficient(0, 1),
    )


def classify(
    eigs: Tuple[complex, complex],
    tol: float = 1e-9,
    rational_bound: int = 64,
) -> TaxonomyTag:
    """Taxonomy of an eigenvalue pair, scale invariant by construction."""
    l1, l2 = complex(eigs[0]), complex(eigs[1])
    if abs(l2) > abs(l1):
        l1, l2 = l2, l1
    scale = abs(l1)
    if scale < 1e-300:
        return TaxonomyTag.DEGENERATE
    if abs(l2) / scale < tol:
        return TaxonomyTag.SADDLE_NODE
    q = l1 / l2
    if abs(q.imag) > tol * abs(q):
        return TaxonomyTag.HYPERBOLIC
    qr = q.real
    if qr < 0:
        return TaxonomyTag.SIEGEL
    detected = continued_fraction_rational(qr, rational_bound, tol * max(1.0, abs(qr)))
    if detected is None:
        return TaxonomyTag.IRRATIONAL_FOCUS
    if detected.denominator == 1:
        return TaxonomyTag.RESONANT
    # positive non-integer rational ratio: linearizable with infinitely many
    # separatrices (the curves x^q = c y^p)
    return TaxonomyTag.DICRITICAL_LINEAR


def _try_exact_point(
    qr: BivariatePolynomial,
    pr: BivariatePolynomial,
    x0: complex,
    y0: complex,
    max_den: int,
) -> Optional[Tuple[GaussianRational, GaussianRational]]:
    parts = []
    for v in (x0.real, x0.imag, y0.real, y0.imag):
        f = continued_fraction_rational(v, max_den, 1e-8 * max(1.0, abs(v)))
        if f is None:
            return None
        parts.append(f)
    gx = GaussianRational(parts[0], parts[1])
    gy = GaussianRational(parts[2], parts[3])
    if qr.eval_exact(gx, gy) or pr.eval_exact(gx, gy):
        return None
    return gx, gy


def _order_at_exact(qr, pr, gx, gy) -> int:
    q0 = qr.shift(gx, gy)
    p0 = pr.shift(gx, gy)
    orders = [p.lowest_order() for p in (q0, p0) if not p.is_zero()]
    return min(orders) if orders else 0


def find_singularities(
    w: MeromorphicOneForm,
    region: ChartRegion = ChartRegion(),
    controls: NumericControls = NumericControls(),
    hints: Tuple[BivariatePolynomial, ...] = (),
) -> List[SingularityRecord]:
    """Common zeros of the reduced tangent field inside the region.

    Resultant elimination in y, univariate roots, then a bivariate Newton
    polish; locations are upgraded to exact Gaussian-rational points whenever
    reconstruction succeeds and verifies exactly.  Declared divisor
    components passed as hints are stripped from the coefficients first.
    """
    qr, pr = w.reduced_tangent_field(hints)
    if qr.is_constant() or pr.is_constant():
        if qr.is_constant() and not qr.is_zero():
            return []
        if pr.is_constant() and not pr.is_zero():
            return []
    dy_p, dy_q = pr.degree_in("y"), qr.degree_in("y")
    if dy_p <= 0 and dy_q <= 0:
        # both univariate in x: any common root gives a vertical line of zeros
        res_x = resultant(pr, qr, "x")
        if res_x.is_zero() or _have_common_root_1d(pr, qr):
            raise SingularityError(
                "non-isolated singular set; remove the common factor of the "
                "form's coefficients and retry"
            )
        return []
    res = resultant(pr, qr, "y") if dy_p > 0 and dy_q > 0 else None
    if res is not None and res.is_zero():
        raise SingularityError(
            "resultant vanishes identically: the coefficients share a factor; "
            "remove it and retry"
        )

    x_candidates = _roots_in_x(res) if res is not None else None
    records: List[SingularityRecord] = []
    seen: List[Tuple[complex, complex]] = []

    def consider(x0: complex, y0: complex):
        x0, y0, resid = newton_polish_2d(
            lambda x, y: (qr.eval_complex(x, y), pr.eval_complex(x, y)),
            lambda x, y: (
                qr.derivative("x").eval_complex(x, y),
                qr.derivative("y").eval_complex(x, y),
                pr.derivative("x").eval_complex(x, y),
                pr.derivative("y").eval_complex(x, y),
            ),
            x0,
            y0,
            tol=controls.newton_tol,
        )
        if resid > 1e-10 or not region.contains(x0, y0):
            return
        for (sx, sy) in seen:
            if abs(sx - x0) < 1e-7 and abs(sy - y0) < 1e-7:
                return
        seen.append((x0, y0))
        exact = _try_exact_point(qr, pr, x0, y0, controls.exact_max_den)
        if exact is not None:
            x0, y0 = complex(exact[0]), complex(exact[1])
            resid = 0.0
        jac = np.array(
            [
                [qr.derivative("x").eval_complex(x0, y0), qr.derivative("y").eval_complex(x0, y0)],
                [-pr.derivative("x").eval_complex(x0, y0), -pr.derivative("y").eval_complex(x0, y0)],
            ]
        )
        eigs = np.linalg.eigvals(jac)
        eigs = sorted(eigs, key=abs, reverse=True)
        tag = classify(tuple(eigs), controls.tol, controls.rational_bound)
        if exact is not None:
            order = _order_at_exact(qr, pr, exact[0], exact[1])
        else:
            order = 1 if np.max(np.abs(jac)) > controls.tol else 2
        records.append(
            SingularityRecord(
                location=(x0, y0),
                exact_location=exact,
                residual=resid,
                linear_part=jac,
                eigenvalues=(complex(eigs[0]), complex(eigs[1])),
                quotient_class=tag,
                order=order,
            )
        )

    if x_candidates is None:
        # one coefficient free of y: its zeros pin x, the other pins y
        in_x, in_y = (pr, qr) if dy_p <= 0 else (qr, pr)
        for x0 in _roots_in_x(in_x):
            for y0 in _roots_of_section(in_y, x0):
                consider(x0, y0)
    else:
        for x0 in x_candidates:
            section = pr if pr.degree_in("y") > 0 else qr
            ys = _roots_of_section(section, x0)
            if not ys:
                ys = _roots_of_section(qr, x0)
            for y0 in ys:
                consider(x0, y0)
    records.sort(key=lambda r: (r.location[0].real, r.location[0].imag, r.location[1].real))
    return records


def _roots_in_x(p: BivariatePolynomial) -> List[complex]:
    d = p.degree_in("x")
    if d <= 0:
        return []
    coeffs = [complex(p.coefficient(i, 0)) for i in range(d, -1, -1)]
    return list(np.roots(coeffs))


def _roots_of_section(p: BivariatePolynomial, x0: complex) -> List[complex]:
    d = p.degree_in("y")
    if d <= 0:
        return []
    coeffs = []
    for j in range(d, -1, -1):
        c = 0.0 + 0.0j
        for (i, jj), g in p.terms.items():
            if jj == j:
                c += complex(g) * x0**i
        coeffs.append(c)
    arr = np.array(coeffs)
    if np.max(np.abs(arr)) < 1e-14:
        return []
    while len(arr) > 1 and abs(arr[0]) < 1e-14 * np.max(np.abs(arr)):
        arr = arr[1:]
    if len(arr) <= 1:
        return []
    return list(np.roots(arr))


def _have_common_root_1d(a: BivariatePolynomial, b: BivariatePolynomial) -> bool:
    ra = _roots_in_x(a)
    rb = _roots_in_x(b)
    return any(abs(x - z) < 1e-9 for x in ra for z in rb)


# -- resonant split --------------------------------------------------------


def _truncated_substitute(p, x_sub, y_sub, deg):
    return p.substitute(x_sub, y_sub).truncate_total_degree(deg)


def resonant_split(
    w: MeromorphicOneForm,
    record: SingularityRecord,
    hints: Tuple[BivariatePolynomial, ...] = (),
) -> TaxonomyTag:
    """Decide dicritical vs Poincare-Dulac for an integer eigenvalue ratio.

    Works on the exact jet: after diagonalizing (ratio n >= 2) the degrees
    2..n are normalized away term by term; the surviving coefficient of y^n
    in the first component is the obstruction.  Ratio 1 reduces to the
    Jordan-block test.  Non-exact singular points only admit a
    tolerance-based answer, reported via SingularityError for now.
    """
    if record.exact_location is None:
        raise SingularityError(
            "resonant split requires an exact singular point (tolerance-based "
            "jet inspection is not trusted)"
        )
    gx, gy = record.exact_location
    qr, pr = w.reduced_tangent_field(hints)
    f = qr.shift(gx, gy)  # x-component of Y
    g = pr.shift(gx, gy).scale(-1)  # y-component
    a, b = f.coefficient(1, 0), f.coefficient(0, 1)
    c, d = g.coefficient(1, 0), g.coefficient(0, 1)
    trace = a + d
    det = a * d - b * c

    ratio = record.eigenvalues[0] / record.eigenvalues[1]
    n = int(round(ratio.real))
    if n < 1:
        raise SingularityError("eigenvalue ratio is not a positive integer")

    if n == 1:
        # equal eigenvalues: scalar linear part <=> linearizable (dicritical)
        lam = trace / 2
        scalar = (
            a == lam and d == lam and not b and not c
        )
        return TaxonomyTag.DICRITICAL_LINEAR if scalar else TaxonomyTag.POINCARE_DULAC

    lam2 = trace / (n + 1)
    lam1 = lam2 * n
    if lam1 * lam2 != det:
        raise SingularityError(
            "linear part does not have an exact integer eigenvalue ratio; "
            "only a tolerance-based answer would be possible"
        )

    # exact eigenvectors: columns of the change of coordinates
    v1 = _eigenvector(a, b, c, d, lam1)
    v2 = _eigenvector(a, b, c, d, lam2)
    det_t = v1[0] * v2[1] - v2[0] * v1[1]
    if not det_t:
        raise SingularityError("linear part is not diagonalizable at ratio n")

    # substitute (x, y) = T (u, v) and multiply by T^{-1} on the left
    xs = X.scale(v1[0]) + Y.scale(v2[0])
    ys = X.scale(v1[1]) + Y.scale(v2[1])
    fu = _truncated_substitute(f, xs, ys, n)
    gu = _truncated_substitute(g, xs, ys, n)
    inv = (
        (v2[1] / det_t, -v2[0] / det_t),
        (-v1[1] / det_t, v1[0] / det_t),
    )
    f2 = fu.scale(inv[0][0]) + gu.scale(inv[0][1])
    g2 = fu.scale(inv[1][0]) + gu.scale(inv[1][1])

    # scale time so the eigenvalues become exactly (n, 1)
    f2 = f2.scale(GR_ONE / lam2)
    g2 = g2.scale(GR_ONE / lam2)

    for deg in range(2, n + 1):
        f2, g2 = _normalize_degree(f2, g2, n, deg)
    obstruction = f2.coefficient(0, n)
    return TaxonomyTag.POINCARE_DULAC if obstruction else TaxonomyTag.DICRITICAL_LINEAR


def _eigenvector(a, b, c, d, lam):
    # kernel of [[a - lam, b], [c, d - lam]]
    if b or (a - lam):
        if b:
            return (b, lam - a)
    if c or (d - lam):
        if c:
            return (lam - d, c)
    return (GR_ONE, GR_ZERO) if not (a - lam) else (GR_ZERO, GR_ONE)


def _normalize_degree(f, g, n, deg):
    """Remove all non-resonant degree-`deg` terms of (f, g); eigenvalues (n, 1)."""
    h1 = {}
    h2 = {}
    for (i, j), coeff in f.terms.items():
        if i + j != deg:
            continue
        divisor = GaussianRational(Fraction(i * n + j - n))
        if not divisor:
            continue  # resonant (only (0, n) survives here)
        h1[(i, j)] = coeff / divisor
    for (i, j), coeff in g.terms.items():
        if i + j != deg:
            continue
        divisor = GaussianRational(Fraction(i * n + j - 1))
        if not divisor:
            continue
        h2[(i, j)] = coeff / divisor
    if not h1 and not h2:
        return f, g
    H1 = BivariatePolynomial(h1)
    H2 = BivariatePolynomial(h2)
    # coordinate change x = u + H1(u,v), y = v + H2(u,v); push the field
    xs = X + H1
    ys = Y + H2
    fu = _truncated_substitute(f, xs, ys, n)
    gu = _truncated_substitute(g, xs, ys, n)
    # (I + DH)^{-1} as a truncated Neumann series
    dh = (
        H1.derivative("x"), H1.derivative("y"),
        H2.derivative("x"), H2.derivative("y"),
    )
    new_f, new_g = fu, gu
    term_f, term_g = fu, gu
    for _ in range(max(1, n // (deg - 1) + 1)):
        tf = -(dh[0] * term_f + dh[1] * term_g).truncate_total_degree(n)
        tg = -(dh[2] * term_f + dh[3] * term_g).truncate_total_degree(n)
        if tf.is_zero() and tg.is_zero():
            break
        new_f, new_g = new_f + tf, new_g + tg
        term_f, term_g = tf, tg
    return new_f.truncate_total_degree(n), new_g.truncate_total_degree(n)

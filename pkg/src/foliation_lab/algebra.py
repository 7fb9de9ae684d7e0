"""Exact arithmetic for bivariate polynomials and rational functions.

Coefficients live in Q(i) (Gaussian rationals, exact `fractions.Fraction`
parts), so divisibility questions that decide invariance of curves and
blow-up multiplicities are answered without floating tolerances.

The substrate is deliberately small: ring arithmetic, exact division,
formal derivatives, substitution (for blow-up pull-backs and translations),
resultants (for singularity elimination) and IEEE evaluation.  No Groebner
bases, no general factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

Scalar = Union[int, Fraction, "GaussianRational"]


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts.

    `Fraction` keeps both parts in lowest terms with positive denominator,
    which is the canonical form every comparison relies on.
    """

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value: Scalar, im: Union[int, Fraction] = 0) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(Fraction(value), Fraction(im))

    @staticmethod
    def _coerce(value) -> Optional["GaussianRational"]:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(Fraction(value))
        return None

    def __add__(self, other: Scalar):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Scalar):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Scalar):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: Scalar):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "GaussianRational":
        o = GaussianRational.of(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other: Scalar) -> "GaussianRational":
        return GaussianRational.of(other) / self

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(Fraction(1))
GR_I = GaussianRational(Fraction(0), Fraction(1))


def _as_gr(c: Scalar) -> GaussianRational:
    return GaussianRational.of(c)


class BivariatePolynomial:
    """Polynomial in x, y as a sparse map (i, j) -> nonzero coefficient.

    Instances are immutable; every operation returns a fresh polynomial with
    zero coefficients dropped, so the term map is always canonical.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[tuple, Scalar]] = None):
        clean = {}
        if terms:
            for (i, j), c in terms.items():
                g = _as_gr(c)
                if g:
                    if i < 0 or j < 0:
                        raise ValueError("negative exponent in polynomial term")
                    clean[(int(i), int(j))] = g
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # immutability guard
        raise AttributeError("BivariatePolynomial is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "BivariatePolynomial":
        return BivariatePolynomial()

    @staticmethod
    def constant(c: Scalar) -> "BivariatePolynomial":
        return BivariatePolynomial({(0, 0): c})

    @staticmethod
    def variable(name: str) -> "BivariatePolynomial":
        if name == "x":
            return BivariatePolynomial({(1, 0): 1})
        if name == "y":
            return BivariatePolynomial({(0, 1): 1})
        raise ValueError(f"unknown variable {name!r}")

    @staticmethod
    def monomial(i: int, j: int, c: Scalar = 1) -> "BivariatePolynomial":
        return BivariatePolynomial({(i, j): c})

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get((0, 0), GR_ZERO)

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(i + j for (i, j) in self.terms)

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return -1
        k = 0 if var == "x" else 1
        return max(key[k] for key in self.terms)

    def coefficient(self, i: int, j: int) -> GaussianRational:
        return self.terms.get((i, j), GR_ZERO)

    def coefficients_in(self, var: str) -> list:
        """Coefficients as polynomials in the other variable, ascending."""
        d = self.degree_in(var)
        out = [dict() for _ in range(d + 1)] if d >= 0 else []
        for (i, j), c in self.terms.items():
            if var == "y":
                out[j][(i, 0)] = c
            else:
                out[i][(0, j)] = c
        return [BivariatePolynomial(t) for t in out]

    # -- ring arithmetic ----------------------------------------------

    def __add__(self, other) -> "BivariatePolynomial":
        other = _coerce_poly(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            s = t.get(k, GR_ZERO) + c
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return BivariatePolynomial(t)

    __radd__ = __add__

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "BivariatePolynomial":
        return self + (-_coerce_poly(other))

    def __rsub__(self, other) -> "BivariatePolynomial":
        return _coerce_poly(other) + (-self)

    def __mul__(self, other) -> "BivariatePolynomial":
        other = _coerce_poly(other)
        t: dict = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                s = t.get(k, GR_ZERO) + c1 * c2
                if s:
                    t[k] = s
                else:
                    t.pop(k, None)
        return BivariatePolynomial(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BivariatePolynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = BivariatePolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c: Scalar) -> "BivariatePolynomial":
        g = _as_gr(c)
        return BivariatePolynomial({k: v * g for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = BivariatePolynomial.constant(other)
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -------------------------------------

    def derivative(self, var: str) -> "BivariatePolynomial":
        t = {}
        for (i, j), c in self.terms.items():
            if var == "x" and i > 0:
                t[(i - 1, j)] = c * i
            elif var == "y" and j > 0:
                t[(i, j - 1)] = c * j
        return BivariatePolynomial(t)

    def substitute(self, x_sub, y_sub) -> "BivariatePolynomial":
        """Exact composition p(x_sub(x, y), y_sub(x, y))."""
        x_sub = _coerce_poly(x_sub)
        y_sub = _coerce_poly(y_sub)
        # Horner over y with x-power caches keeps this polynomial-time.
        xp = {0: BivariatePolynomial.constant(1)}
        yp = {0: BivariatePolynomial.constant(1)}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        out = BivariatePolynomial.zero()
        for (i, j), c in self.terms.items():
            out = out + power(xp, x_sub, i) * power(yp, y_sub, j) * BivariatePolynomial.constant(c)
        return out

    def shift(self, cx: Scalar, cy: Scalar) -> "BivariatePolynomial":
        """p(x + cx, y + cy): recenters a point of interest at the origin."""
        x = BivariatePolynomial.variable("x") + BivariatePolynomial.constant(cx)
        y = BivariatePolynomial.variable("y") + BivariatePolynomial.constant(cy)
        return self.substitute(x, y)

    def eval_exact(self, px: Scalar, py: Scalar) -> GaussianRational:
        gx, gy = _as_gr(px), _as_gr(py)
        out = GR_ZERO
        for (i, j), c in self.terms.items():
            term = c
            for _ in range(i):
                term = term * gx
            for _ in range(j):
                term = term * gy
            out = out + term
        return out

    def eval_complex(self, x: complex, y: complex) -> complex:
        """Horner evaluation: inner loop over y, outer over x powers."""
        by_i: dict = {}
        for (i, j), c in self.terms.items():
            by_i.setdefault(i, {})[j] = complex(c)
        total = 0.0 + 0.0j
        for i in sorted(by_i, reverse=True):
            row = by_i[i]
            degj = max(row)
            acc = row[degj]
            for j in range(degj - 1, -1, -1):
                acc = acc * y + row.get(j, 0.0)
            total += acc * x**i
        return total

    # -- divisibility ---------------------------------------------------

    def truncate_total_degree(self, d: int) -> "BivariatePolynomial":
        return BivariatePolynomial(
            {k: c for k, c in self.terms.items() if k[0] + k[1] <= d}
        )

    def monomial_content(self) -> tuple:
        """(i0, j0) with x^i0 y^j0 dividing every term (zero poly gives (0, 0))."""
        if not self.terms:
            return (0, 0)
        return (min(i for i, _ in self.terms), min(j for _, j in self.terms))

    def divide_by_monomial(self, i0: int, j0: int) -> "BivariatePolynomial":
        return BivariatePolynomial(
            {(i - i0, j - j0): c for (i, j), c in self.terms.items()}
        )

    def lowest_order(self) -> int:
        """Order of the first nonzero jet at the origin (0 for units)."""
        if not self.terms:
            return -1
        return min(i + j for (i, j) in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms, key=lambda k: (k[0] + k[1], k[0], k[1])):
            c = self.terms[(i, j)]
            mono = "*".join(
                ([f"x^{i}" if i > 1 else "x"] if i else [])
                + ([f"y^{j}" if j > 1 else "y"] if j else [])
            )
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono and cs not in ("1",) else (mono or cs))
        return " + ".join(parts)

    __repr__ = __str__


def _coerce_poly(p) -> BivariatePolynomial:
    if isinstance(p, BivariatePolynomial):
        return p
    if isinstance(p, (int, Fraction, GaussianRational)):
        return BivariatePolynomial.constant(p)
    raise TypeError(f"cannot coerce {type(p).__name__} to polynomial")


X = BivariatePolynomial.variable("x")
Y = BivariatePolynomial.variable("y")
ONE = BivariatePolynomial.constant(1)
ZERO = BivariatePolynomial.zero()


def poly_divide_exact(
    a: BivariatePolynomial, b: BivariatePolynomial
) -> Optional[BivariatePolynomial]:
    """Quotient q with a = q*b when b divides a exactly, else None.

    Division runs in the lead variable (y when present in b, else x) with
    polynomial coefficients; coefficient divisions recurse.  A failed leading
    division certifies non-divisibility, because any exact quotient would make
    leading coefficients divide.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return ZERO
    if b.is_constant():
        inv = GR_ONE / b.constant_value()
        return a.scale(inv)
    var = "y" if b.degree_in("y") > 0 else "x"
    da, db = a.degree_in(var), b.degree_in(var)
    if da < db:
        return None
    ca = a.coefficients_in(var)
    cb = b.coefficients_in(var)
    lead_b = cb[-1]
    # classic long division, all steps exact or bail out
    rem = list(ca)
    quot = [ZERO] * (da - db + 1)
    for k in range(da - db, -1, -1):
        top = rem[k + db] if k + db < len(rem) else ZERO
        if top.is_zero():
            continue
        q = poly_divide_exact(top, lead_b)
        if q is None:
            return None
        quot[k] = q
        for m in range(db + 1):
            rem[k + m] = rem[k + m] - q * cb[m]
    if any(not r.is_zero() for r in rem):
        return None
    out = ZERO
    unit = X if var == "x" else Y
    for k, q in enumerate(quot):
        out = out + q * unit**k
    return out


def poly_divides(b: BivariatePolynomial, a: BivariatePolynomial) -> bool:
    """True when b | a exactly."""
    return poly_divide_exact(a, b) is not None


def extract_factor(
    a: BivariatePolynomial, f: BivariatePolynomial
) -> tuple:
    """Largest k with f^k | a; returns (k, a / f^k).  Zero input gives (0, 0)."""
    if a.is_zero():
        return 0, a
    k = 0
    while True:
        q = poly_divide_exact(a, f)
        if q is None:
            return k, a
        a = q
        k += 1


def resultant(
    a: BivariatePolynomial, b: BivariatePolynomial, var: str
) -> BivariatePolynomial:
    """Resultant eliminating `var`; result is a polynomial in the other one.

    Sylvester determinant over the polynomial ring, expanded by fraction-free
    (Bareiss) elimination so every division is exact.
    """
    da, db = a.degree_in(var), b.degree_in(var)
    if da < 0 or db < 0:
        return ZERO
    if da == 0 and db == 0:
        return ONE  # two constants in var: resultant is 1 by convention
    ca = a.coefficients_in(var)[::-1]  # descending
    cb = b.coefficients_in(var)[::-1]
    n = da + db
    rows = []
    for r in range(db):
        rows.append([ZERO] * r + ca + [ZERO] * (n - da - 1 - r))
    for r in range(da):
        rows.append([ZERO] * r + cb + [ZERO] * (n - db - 1 - r))
    return _bareiss_determinant(rows)


def _bareiss_determinant(m: list) -> BivariatePolynomial:
    n = len(m)
    if n == 0:
        return ONE
    m = [row[:] for row in m]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                q = poly_divide_exact(num, prev)
                assert q is not None, "Bareiss division must be exact"
                m[i][j] = q
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det.scale(-1) if sign < 0 else det


class NearPoleError(ArithmeticError):
    """Raised when a rational function is evaluated too close to its poles."""

    def __init__(self, denominator_modulus: float):
        self.denominator_modulus = denominator_modulus
        super().__init__(
            f"denominator modulus {denominator_modulus:.3e} below pole tolerance"
        )


class RationalFunction:
    """Quotient of bivariate polynomials with a best-effort reduction.

    Equality is cross-multiplication equality; reduction cancels scalar
    content, monomial content and exact polynomial divisibility between
    numerator and denominator (full multivariate gcd is out of scope and
    unnecessary for correctness).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        num = _coerce_poly(num)
        den = _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        num, den = self._reduce(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def _reduce(num, den):
        if num.is_zero():
            return ZERO, ONE
        i0 = min(num.monomial_content()[0], den.monomial_content()[0])
        j0 = min(num.monomial_content()[1], den.monomial_content()[1])
        if i0 or j0:
            num = num.divide_by_monomial(i0, j0)
            den = den.divide_by_monomial(i0, j0)
        q = poly_divide_exact(num, den)
        if q is not None:
            num, den = q, ONE
        else:
            q = poly_divide_exact(den, num)
            if q is not None:
                num, den = ONE, q
        # normalize a constant denominator away, then fix the leading unit
        if den.is_constant():
            num = num.scale(GR_ONE / den.constant_value())
            den = ONE
        else:
            lead = den.terms[max(den.terms, key=lambda k: (k[0] + k[1], k[0], k[1]))]
            num = num.scale(GR_ONE / lead)
            den = den.scale(GR_ONE / lead)
        return num, den

    @staticmethod
    def of(v) -> "RationalFunction":
        if isinstance(v, RationalFunction):
            return v
        return RationalFunction(_coerce_poly(v))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "RationalFunction":
        o = RationalFunction.of(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.of(other))

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction.of(other) + (-self)

    def __mul__(self, other) -> "RationalFunction":
        o = RationalFunction.of(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        o = RationalFunction.of(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction.of(other) / self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational, BivariatePolynomial)):
            other = RationalFunction.of(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((frozenset(self.num.terms.items()), frozenset(self.den.terms.items())))

    def derivative(self, var: str) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative(var) * self.den - self.num * self.den.derivative(var),
            self.den * self.den,
        )

    def substitute(self, x_sub, y_sub) -> "RationalFunction":
        return RationalFunction(
            self.num.substitute(x_sub, y_sub), self.den.substitute(x_sub, y_sub)
        )

    def shift(self, cx: Scalar, cy: Scalar) -> "RationalFunction":
        return RationalFunction(self.num.shift(cx, cy), self.den.shift(cx, cy))

    def eval_complex(self, x: complex, y: complex, pole_tol: float = 1e-12) -> complex:
        d = self.den.eval_complex(x, y)
        if abs(d) <= pole_tol:
            raise NearPoleError(abs(d))
        return self.num.eval_complex(x, y) / d

    def eval_exact(self, px: Scalar, py: Scalar) -> GaussianRational:
        d = self.den.eval_exact(px, py)
        if not d:
            raise ZeroDivisionError("exact evaluation at a pole")
        return self.num.eval_exact(px, py) / d

    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


RF_ZERO = RationalFunction(ZERO)
RF_ONE = RationalFunction(ONE)


def evaluate(f: RationalFunction, point, pole_tol: float = 1e-12) -> complex:
    """IEEE evaluation of f at a complex point, guarding pole proximity."""
    x, y = complex(point[0]), complex(point[1])
    return f.eval_complex(x, y, pole_tol)

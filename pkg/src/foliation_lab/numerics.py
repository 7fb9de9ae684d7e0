"""Shared numerical kernels: adaptive Runge-Kutta for complex states,
event localization, quadrature, Richardson differentiation and rational
detection by continued fractions.

Everything here is deterministic: fixed tableaus, fixed refinement rules,
no randomness and no wall-clock dependence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np

# Cash-Karp 5(4) pair
_CK_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
_CK_C = (0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8)
_CK_B5 = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)
_CK_B4 = (2825 / 27648, 0.0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4)


class IntegrationError(RuntimeError):
    pass


@dataclass
class OdeResult:
    ts: List[float]
    ys: List[np.ndarray]
    status: str  # "reached_end" | "event" | "stiff" | "max_steps"
    event_index: Optional[int] = None
    n_steps: int = 0

    @property
    def t(self) -> float:
        return self.ts[-1]

    @property
    def y(self) -> np.ndarray:
        return self.ys[-1]


def ck_step(f, t, y, h):
    """One Cash-Karp 5(4) step; returns (y5, error_estimate)."""
    k = []
    for s in range(6):
        ys = y.copy()
        for j, a in enumerate(_CK_A[s]):
            ys = ys + h * a * k[j]
        k.append(np.asarray(f(t + _CK_C[s] * h, ys), dtype=complex))
    y5 = y + h * sum(b * ki for b, ki in zip(_CK_B5, k))
    y4 = y + h * sum(b * ki for b, ki in zip(_CK_B4, k))
    return y5, float(np.max(np.abs(y5 - y4)))


def integrate_ode(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[complex],
    t_end: float,
    tol: float = 1e-10,
    h0: float = 1e-3,
    h_min: float = 1e-14,
    h_max: float = 0.1,
    events: Optional[List[Callable[[float, np.ndarray], float]]] = None,
    event_tol: float = 1e-12,
    max_steps: int = 200000,
    record: bool = True,
) -> OdeResult:
    """Adaptive Cash-Karp integration of a complex ODE system.

    Events are real-valued functions of (t, y); an accepted step with a sign
    change (or a touch below event_tol) is shrunk by bisection until the
    crossing is located to event_tol in the event value.
    """
    t, y = float(t0), np.asarray(y0, dtype=complex)
    direction = 1.0 if t_end >= t0 else -1.0
    h = min(abs(h0), abs(t_end - t0)) * direction
    ts, ys = [t], [y.copy()]
    ev_prev = [e(t, y) for e in events] if events else []
    steps = 0
    while (t_end - t) * direction > 0:
        if abs(h) > abs(t_end - t):
            h = (t_end - t)
        if abs(h) < h_min:
            return OdeResult(ts, ys, "stiff", None, steps)
        y_new, err = ck_step(f, t, y, h)
        steps += 1
        if steps > max_steps:
            return OdeResult(ts, ys, "max_steps", None, steps)
        scale = tol * (1.0 + float(np.max(np.abs(y))))
        if err > scale:
            h *= max(0.1, 0.9 * (scale / err) ** 0.25)
            continue
        # step accepted; look for event crossings before committing
        if events:
            ev_new = [e(t + h, y_new) for e in events]
            hit = None
            for idx, (a, b) in enumerate(zip(ev_prev, ev_new)):
                if a > event_tol and b <= event_tol:
                    hit = idx
                    break
            if hit is not None:
                t_ev, y_ev = _locate_event(f, events[hit], t, y, h, event_tol, tol)
                if record:
                    ts.append(t_ev)
                    ys.append(y_ev)
                else:
                    ts[-1], ys[-1] = t_ev, y_ev
                return OdeResult(ts, ys, "event", hit, steps)
            ev_prev = ev_new
        t = t + h
        y = y_new
        if record:
            ts.append(t)
            ys.append(y.copy())
        else:
            ts[-1], ys[-1] = t, y.copy()
        if err > 0:
            h *= min(5.0, 0.9 * (scale / err) ** 0.2)
        else:
            h *= 5.0
        if abs(h) > h_max:
            h = h_max * direction
    return OdeResult(ts, ys, "reached_end", None, steps)


def _locate_event(f, event, t, y, h, event_tol, tol):
    """Bisect the step [t, t+h] down to the first crossing of the event."""
    lo, hi = 0.0, 1.0
    y_lo = y
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        y_mid, _ = _substep(f, t + lo * h, y_lo, (mid - lo) * h, tol)
        v = event(t + mid * h, y_mid)
        if v <= event_tol:
            hi = mid
        else:
            lo, y_lo = mid, y_mid
        if (hi - lo) * abs(h) < 1e-15 or abs(v) <= event_tol:
            y_hit, _ = _substep(f, t + lo * h, y_lo, (hi - lo) * h, tol)
            return t + hi * h, y_hit
    y_hit, _ = _substep(f, t + lo * h, y_lo, (hi - lo) * h, tol)
    return t + hi * h, y_hit


def _substep(f, t, y, h, tol, pieces=4):
    """Fixed small march used only inside event localization."""
    if h == 0:
        return y, 0.0
    yh = y
    hh = h / pieces
    err_total = 0.0
    for i in range(pieces):
        yh, err = ck_step(f, t + i * hh, yh, hh)
        err_total += err
    return yh, err_total


# -- quadrature -----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def segment_integral(f: Callable[[float], complex], a: float = 0.0, b: float = 1.0,
                     tol: float = 1e-12, depth: int = 0) -> complex:
    """Adaptive Gauss-Legendre integral of a complex function on [a, b]."""
    mid = 0.5 * (a + b)
    whole = _gl(f, a, b)
    left, right = _gl(f, a, mid), _gl(f, mid, b)
    if abs(whole - left - right) < tol or depth >= 18:
        return left + right
    return (
        segment_integral(f, a, mid, tol / 2, depth + 1)
        + segment_integral(f, mid, b, tol / 2, depth + 1)
    )


def _gl(f, a, b):
    half = 0.5 * (b - a)
    midp = 0.5 * (a + b)
    return half * sum(w * f(midp + half * x) for x, w in zip(_GL_NODES, _GL_WEIGHTS))


# -- differentiation ------------------------------------------------------

def richardson_derivative(
    fn: Callable[[complex], complex], z0: complex, h0: float = 1e-3, levels: int = 4
) -> complex:
    """Central-difference derivative with Richardson extrapolation."""
    table = []
    h = h0
    for _ in range(levels):
        table.append((fn(z0 + h) - fn(z0 - h)) / (2 * h))
        h /= 2.0
    table = list(table)
    for k in range(1, levels):
        fac = 4.0**k
        table = [
            (fac * table[i + 1] - table[i]) / (fac - 1.0)
            for i in range(len(table) - 1)
        ]
    return table[0]


# -- rational detection ---------------------------------------------------

def continued_fraction_rational(
    x: float, max_den: int = 64, tol: float = 1e-9
) -> Optional[Fraction]:
    """Best rational p/q, q <= max_den, if it matches x within tol."""
    if not np.isfinite(x):
        return None
    sign = -1 if x < 0 else 1
    x = abs(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    val = x
    for _ in range(64):
        a = int(np.floor(val))
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_den:
            break
        if abs(x - p1 / q1) <= tol:
            return Fraction(sign * p1, q1)
        frac = val - a
        if frac < 1e-15:
            break
        val = 1.0 / frac
    return None


def winding_number(values: Sequence[complex]) -> float:
    """Total argument increment of a closed sample loop, in full turns."""
    vals = np.asarray(values, dtype=complex)
    if np.any(np.abs(vals) == 0):
        raise ValueError("winding number undefined through zero")
    ratios = vals[1:] / vals[:-1]
    return float(np.sum(np.angle(ratios)) / (2 * np.pi))


# -- Newton ---------------------------------------------------------------

def newton_polish_2d(
    F: Callable[[complex, complex], tuple],
    J: Callable[[complex, complex], tuple],
    x0: complex,
    y0: complex,
    tol: float = 1e-14,
    max_iter: int = 60,
) -> tuple:
    """Newton on a pair of complex equations; returns (x, y, residual)."""
    x, y = complex(x0), complex(y0)
    res = float("inf")
    for _ in range(max_iter):
        f1, f2 = F(x, y)
        res = max(abs(f1), abs(f2))
        if res < tol:
            break
        a, b, c, d = J(x, y)
        det = a * d - b * c
        if det == 0 or not np.isfinite(abs(det)):
            break
        dx = (f1 * d - f2 * b) / det
        dy = (a * f2 - c * f1) / det
        x, y = x - dx, y - dy
    f1, f2 = F(x, y)
    return x, y, max(abs(f1), abs(f2))


def newton_1d(
    f: Callable[[complex], complex],
    z0: complex,
    tol: float = 1e-13,
    max_iter: int = 60,
    h: float = 1e-7,
) -> complex:
    """Secant-started Newton with numeric derivative; returns best iterate."""
    z = complex(z0)
    for _ in range(max_iter):
        v = f(z)
        if abs(v) < tol:
            return z
        d = (f(z + h) - f(z - h)) / (2 * h)
        if d == 0:
            break
        z = z - v / d
    return z


@dataclass
class LinearFit:
    slope: float
    intercept: float
    max_residual: float
    rel_residual: float  # max residual over the data range


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Least-squares line with residual diagnostics used by contraction checks."""
    xa, ya = np.asarray(xs, float), np.asarray(ys, float)
    if len(xa) < 2:
        raise ValueError("need at least two samples for a line")
    slope, intercept = np.polyfit(xa, ya, 1)
    pred = slope * xa + intercept
    max_res = float(np.max(np.abs(ya - pred)))
    spread = float(np.max(ya) - np.min(ya)) or 1.0
    return LinearFit(float(slope), float(intercept), max_res, max_res / spread)

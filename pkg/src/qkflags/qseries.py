"""q-Pochhammer symbols and the localization bracket {x}_d."""
from __future__ import annotations

from .core import ParameterFrame, PoleError

_POLE_RTOL = 1e-14


def _check(den: complex, scale: float, what: str):
    if abs(den) <= _POLE_RTOL * max(scale, 1.0):
        raise PoleError(f"vanishing denominator factor in {what}")


def q_pochhammer(x: complex, d: int, q: complex) -> complex:
    """(x; q)_d = phi(x)/phi(q^d x), extended to negative ``d``.

    d >= 0 gives prod_{i=0}^{d-1} (1 - q^i x); d < 0 gives
    prod_{i=1}^{-d} (1 - q^{-i} x)^{-1}.
    """
    x, q = complex(x), complex(q)
    out = 1.0 + 0j
    if d >= 0:
        for i in range(d):
            out *= 1.0 - q ** i * x
        return out
    for i in range(1, -d + 1):
        t = q ** (-i) * x
        f = 1.0 - t
        _check(f, abs(t), f"(x;q)_{d}")
        out /= f
    return out


def bracket(x: complex, d: int, frame: ParameterFrame) -> complex:
    """{x}_d = (hbar/x; q)_d / (q/x; q)_d * (-q^{1/2} hbar^{-1/2})^d.

    The two Pochhammer symbols are combined factor by factor, so for d < 0 a
    pole of (q/x; q)_d correctly produces a zero of the bracket instead of an
    error.
    """
    x = complex(x)
    q, hb = frame.q, frame.hbar
    out = 1.0 + 0j
    if d >= 0:
        for i in range(d):
            t = q ** (i + 1) / x
            den = 1.0 - t
            _check(den, abs(t), f"{{x}}_{d} at x={x}")
            out *= (1.0 - q ** i * hb / x) / den
    else:
        for i in range(1, -d + 1):
            t = q ** (-i) * hb / x
            den = 1.0 - t
            _check(den, abs(t), f"{{x}}_{d} at x={x}")
            out *= (1.0 - q ** (1 - i) / x) / den
    return out * (-frame.q_sqrt / frame.h) ** d


def compact_bracket(x: complex, d: int, frame: ParameterFrame) -> complex:
    """lim_{hbar -> oo} hbar^{-d/2} (-1)^d {x}_d.

    Closed form (-1)^d q^{d^2/2} x^{-d} / (q/x; q)_d; only ``frame.q_sqrt``
    is used.
    """
    x = complex(x)
    qs = frame.q_sqrt
    q = qs * qs
    pref = (-1) ** (d % 2) * qs ** (d * d) * x ** (-d)
    out = 1.0 + 0j
    if d >= 0:
        for i in range(d):
            t = q ** (i + 1) / x
            den = 1.0 - t
            _check(den, abs(t), f"compact {{x}}_{d} at x={x}")
            out /= den
    else:
        for i in range(1, -d + 1):
            out *= 1.0 - q ** (1 - i) / x
    return pref * out

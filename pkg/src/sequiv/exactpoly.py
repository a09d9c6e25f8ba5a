"""Exact polynomials over the Gaussian rationals Q[i].

The orthogonal family ``W_n`` (weight ``1/cosh(pi x)``), the difference
operator ``h`` with eigenvalues ``n + 1/2`` and the raising operator ``R``
live here. Everything is computed with ``fractions.Fraction`` so identities
are checked with zero tolerance.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Sequence

from .errors import NonRealInput

__all__ = [
    "GaussianRational",
    "GaussianRationalPoly",
    "WFamily",
    "I",
    "X",
    "apply_R",
    "apply_h",
    "commutator_residual",
    "generating_check",
    "generating_series",
    "poly_from_json",
    "poly_to_json",
    "shift_poly",
    "w_poly",
]


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot convert {type(v).__name__} to an exact rational")


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Complex number ``re + i*im`` with exact rational parts.

    ``Fraction`` keeps both parts gcd-reduced with positive denominator.
    """

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def coerce(cls, v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(_frac(v))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


class GaussianRationalPoly:
    """Polynomial in one variable with Gaussian-rational coefficients.

    ``coeffs[k]`` multiplies ``x**k``. Trailing zeros are stripped, so the
    zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[GaussianRational, ...] = tuple(cs)

    @classmethod
    def constant(cls, c) -> "GaussianRationalPoly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "GaussianRationalPoly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def real_coeffs(self) -> list[Fraction]:
        if not self.is_real():
            raise NonRealInput("polynomial has non-real coefficients")
        return [c.re for c in self.coeffs]

    def __getitem__(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def __eq__(self, other):
        if isinstance(other, GaussianRationalPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        o = _as_poly(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return GaussianRationalPoly(self[k] + o[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return GaussianRationalPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        o = _as_poly(other)
        if self.is_zero() or o.is_zero():
            return GaussianRationalPoly()
        out = [ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return GaussianRationalPoly(out)

    __rmul__ = __mul__

    def __call__(self, x):
        """Horner evaluation; exact for Gaussian-rational ``x``, floating for
        float/complex ``x``."""
        if isinstance(x, (float, complex)):
            acc = 0j
            for c in reversed(self.coeffs):
                acc = acc * x + complex(c)
            return acc
        xg = GaussianRational.coerce(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * xg + c
        return acc

    def reflect(self) -> "GaussianRationalPoly":
        """Return ``f(-x)``."""
        return GaussianRationalPoly(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def scale(self, c) -> "GaussianRationalPoly":
        c = GaussianRational.coerce(c)
        return GaussianRationalPoly(a * c for a in self.coeffs)

    def float_coeffs(self) -> list[complex]:
        return [complex(c) for c in self.coeffs]

    def __repr__(self):
        return f"GaussianRationalPoly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            cs = str(c)
            if mono and cs == "1":
                cs = ""
            elif mono and cs == "-1":
                cs = "-"
            terms.append(f"{cs}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(v) -> GaussianRationalPoly:
    if isinstance(v, GaussianRationalPoly):
        return v
    return GaussianRationalPoly.constant(v)


X = GaussianRationalPoly([0, 1])


def shift_poly(f: GaussianRationalPoly, c) -> GaussianRationalPoly:
    """Exact Taylor shift: the polynomial ``x -> f(x + c)``."""
    lin = GaussianRationalPoly([c, 1])
    acc = GaussianRationalPoly()
    for a in reversed(f.coeffs):
        acc = acc * lin + a
    return acc


_HALF = Fraction(1, 2)
# (1/2 - i x) and (1/2 + i x)
_LEFT = GaussianRationalPoly([_HALF, GaussianRational(0, -1)])
_RIGHT = GaussianRationalPoly([_HALF, GaussianRational(0, 1)])


def _require_real(f: GaussianRationalPoly):
    if not f.is_real():
        raise NonRealInput("operator is defined here for real-coefficient polynomials only")


def apply_h(f: GaussianRationalPoly) -> GaussianRationalPoly:
    """``(h f)(x) = 1/2 (1/2 - ix) f(x+i) + 1/2 (1/2 + ix) f(x-i)``."""
    _require_real(f)
    up = shift_poly(f, I)
    down = shift_poly(f, -I)
    return (_LEFT * up + _RIGHT * down).scale(_HALF)


def apply_R(f: GaussianRationalPoly) -> GaussianRationalPoly:
    """Raising operator,
    ``(R f)(x) = i/2 (1/2 - ix) f(x+i) - i/2 (1/2 + ix) f(x-i) + x f(x)``.
    """
    _require_real(f)
    half_i = GaussianRational(0, _HALF)
    up = shift_poly(f, I)
    down = shift_poly(f, -I)
    return (_LEFT * up).scale(half_i) - (_RIGHT * down).scale(half_i) + X * f


def commutator_residual(f: GaussianRationalPoly) -> GaussianRationalPoly:
    """``(hR - Rh - R) f``; the zero polynomial when ``[h, R] = R`` holds on ``f``."""
    _require_real(f)
    rf = apply_R(f)
    return apply_h(rf) - apply_R(apply_h(f)) - rf


class WFamily:
    """Memoised ``W_n`` built from ``W_{n+1} = 2x W_n - n^2 W_{n-1}``.

    Extension of the cache is serialised by a lock so the instance can be
    shared between threads.
    """

    def __init__(self):
        self._cache: list[GaussianRationalPoly] = [GaussianRationalPoly([1]), GaussianRationalPoly([0, 2])]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._cache)

    def __getitem__(self, n: int) -> GaussianRationalPoly:
        if n < 0:
            raise ValueError("W_n is defined for n >= 0")
        if n >= len(self._cache):
            with self._lock:
                cache = self._cache
                while len(cache) <= n:
                    k = len(cache) - 1
                    cache.append(X * cache[k] * 2 - cache[k - 1].scale(k * k))
        return self._cache[n]


_W = WFamily()


def w_poly(n: int) -> GaussianRationalPoly:
    """Exact ``W_n``: ``W_0 = 1``, ``W_1 = 2x``, ``W_2 = 4x^2 - 1``, ..."""
    return _W[n]


def w_eval(n: int, x: float) -> float:
    """``W_n(x)`` for real float ``x``, evaluated exactly and then rounded."""
    coeffs = w_poly(n).real_coeffs()
    xf = Fraction(x)
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * xf + c
    return float(acc)


def _series_mul(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    return [sum((a[k] * b[n - k] for k in range(n + 1)), Fraction(0)) for n in range(order + 1)]


def _series_exp(c: Sequence[Fraction], order: int) -> list[Fraction]:
    # exp of a series with c[0] == 0 via n b_n = sum_k k c_k b_{n-k}
    b = [Fraction(1)] + [Fraction(0)] * order
    for n in range(1, order + 1):
        b[n] = sum((k * c[k] * b[n - k] for k in range(1, n + 1)), Fraction(0)) / n
    return b


def generating_series(x0, order: int) -> list[Fraction]:
    """Taylor coefficients in ``t`` of ``(1 + t^2)^(-1/2) exp(2 x0 arctan t)``
    through ``t**order``, in exact rationals."""
    x0 = _frac(x0)
    inv_sqrt = [Fraction(0)] * (order + 1)
    for k in range(order // 2 + 1):
        # binom(-1/2, k) = (-1)^k (2k)! / (4^k (k!)^2)
        inv_sqrt[2 * k] = Fraction((-1) ** k * factorial(2 * k), 4**k * factorial(k) ** 2)
    atan = [Fraction(0)] * (order + 1)
    for k in range((order - 1) // 2 + 1):
        if 2 * k + 1 <= order:
            atan[2 * k + 1] = Fraction((-1) ** k, 2 * k + 1)
    expo = _series_exp([2 * x0 * a for a in atan], order)
    return _series_mul(inv_sqrt, expo, order)


def generating_check(x0, N: int) -> Fraction:
    """Max ``|[t^n] W(x0, t) - W_n(x0)/n!|`` for ``n <= N`` (exact)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    x0 = _frac(x0)
    series = generating_series(x0, N)
    dev = Fraction(0)
    for n in range(N + 1):
        wn = w_poly(n)(x0)
        target = wn.re / factorial(n)
        dev = max(dev, abs(series[n] - target))
    return dev


def _frac_pair(q: Fraction) -> list[int]:
    return [q.numerator, q.denominator]


def poly_to_json(f: GaussianRationalPoly) -> str:
    """Serialise as ``{"coeffs": [{"re": [num, den], "im": [num, den]}, ...]}``."""
    payload = {"coeffs": [{"re": _frac_pair(c.re), "im": _frac_pair(c.im)} for c in f.coeffs]}
    return json.dumps(payload)


def poly_from_json(text: str) -> GaussianRationalPoly:
    payload = json.loads(text)
    return GaussianRationalPoly(
        GaussianRational(Fraction(*c["re"]), Fraction(*c["im"])) for c in payload["coeffs"]
    )

"""Precision-carrying complex numbers.

Values are stored as mpmath binary floats but every contract is stated in
significant *decimal* digits.  All arithmetic runs inside a local
``workdps`` block so no caller ever has to touch the global mpmath context.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mp
from mpmath.libmp import dps_to_prec, from_rational, mpf_neg, round_nearest

from .errors import DomainError, ExpOverflowError

MIN_PREC = 10
MAX_PREC = 1000

# |Re w| above this is rejected by cx_exp (10^8 * ln 10).
EXP_GUARD = mpmath.mpf(10) ** 8 * mpmath.log(10)

Number = Union[int, float, str, Fraction, complex, "mpmath.mpf", "mpmath.mpc"]


def check_prec(prec: int, max_prec: int = MAX_PREC) -> int:
    if not isinstance(prec, int) or isinstance(prec, bool):
        raise TypeError(f"precision must be an int, got {prec!r}")
    if prec < MIN_PREC or prec > max_prec:
        raise ValueError(f"precision {prec} outside [{MIN_PREC}, {max_prec}]")
    return prec


def mpf_from_fraction(q: Fraction, prec: int) -> mpmath.mpf:
    """Correctly rounded binary image of an exact rational at ``prec`` digits."""
    bits = dps_to_prec(prec)
    return mp.make_mpf(from_rational(q.numerator, q.denominator, bits, round_nearest))


def mpf_to_decimal(x: mpmath.mpf) -> decimal.Decimal:
    """Exact decimal expansion of a binary float (no rounding)."""
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:  # inf / nan
            raise DomainError(f"non-finite value {x}")
        return decimal.Decimal(0)
    man = int(man)
    if exp >= 0:
        coeff, dexp = man << exp, 0
    else:
        # man * 2^exp = man * 5^-exp * 10^exp, built exactly (no context rounding)
        coeff, dexp = man * 5 ** (-exp), exp
    return decimal.Decimal((sign, tuple(map(int, str(coeff))), dexp))


def round_decimal(d: decimal.Decimal, digits: int) -> decimal.Decimal:
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN,
                          Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
    return ctx.plus(d)


def format_decimal(d: decimal.Decimal, digits: int) -> str:
    """Render ``d`` with exactly ``digits`` significant digits.

    Positional notation is used while the decimal exponent stays in
    [-6, digits); outside that range an ``e`` exponent is appended.
    """
    d = round_decimal(d, digits)
    if d.is_zero():
        return "0." + "0" * (digits - 1)
    sign, digs, exp = d.as_tuple()
    digs = "".join(map(str, digs)).ljust(digits, "0")[:digits]
    # exponent of the leading digit
    lead = exp + len(d.as_tuple().digits) - 1
    s = "-" if sign else ""
    if -6 <= lead < digits:
        if lead >= 0:
            body = digs[: lead + 1] + "." + digs[lead + 1:]
            if body.endswith("."):
                body += "0"
        else:
            body = "0." + "0" * (-lead - 1) + digs
        return s + body
    body = digs[0] + "." + (digs[1:] or "0")
    return f"{s}{body}e{lead}"


def format_mpf(x: mpmath.mpf, digits: int) -> str:
    return format_decimal(mpf_to_decimal(x), digits)


def parse_decimal(s: str) -> Fraction:
    """Exact rational value of a decimal string (``1.5``, ``-2e-3``, ...)."""
    try:
        d = decimal.Decimal(s.strip())
    except decimal.InvalidOperation as exc:
        raise ValueError(f"not a decimal number: {s!r}") from exc
    if not d.is_finite():
        raise ValueError(f"not a finite decimal: {s!r}")
    return Fraction(d)


@dataclass(frozen=True)
class RationalComplex:
    """Exact complex rational."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def to_prec(self, prec: int) -> "PrecComplex":
        check_prec(prec)
        return PrecComplex(mpf_from_fraction(self.re, prec),
                           mpf_from_fraction(self.im, prec), prec)

    def __str__(self):
        return f"({self.re})+({self.im})i"


@dataclass(frozen=True)
class PrecComplex:
    """Complex number with an explicit count of significant decimal digits.

    ``re`` and ``im`` are mpmath floats already rounded to ``prec`` digits.
    Binary operations between values of different precision produce a
    result at the smaller precision.
    """

    re: mpmath.mpf
    im: mpmath.mpf
    prec: int

    def __post_init__(self):
        check_prec(self.prec)

    # -- construction -----------------------------------------------------

    @classmethod
    def make(cls, value: Number, prec: int, im: Number | None = None) -> "PrecComplex":
        """Build from ints, Fractions, decimal strings, floats or mpmath values.

        Strings and Fractions are converted exactly and rounded once.
        """
        check_prec(prec)
        if im is not None:
            return cls(_to_mpf(value, prec), _to_mpf(im, prec), prec)
        if isinstance(value, PrecComplex):
            return reprecision(value, prec)
        if isinstance(value, RationalComplex):
            return value.to_prec(prec)
        if isinstance(value, (complex, mpmath.mpc)):
            with mp.workdps(prec):
                v = mpmath.mpc(value)
                return cls(+v.real, +v.imag, prec)
        return cls(_to_mpf(value, prec), _to_mpf(0, prec), prec)

    @classmethod
    def from_strings(cls, re: str, im: str, prec: int) -> "PrecComplex":
        return cls(mpf_from_fraction(parse_decimal(re), prec),
                   mpf_from_fraction(parse_decimal(im), prec), prec)

    @classmethod
    def from_mpc(cls, v: mpmath.mpc, prec: int) -> "PrecComplex":
        with mp.workdps(prec):
            return cls(+v.real, +v.imag, prec)

    # -- views ------------------------------------------------------------

    @property
    def mpc(self) -> mpmath.mpc:
        # make_mpc does not round to the (possibly lower) global precision
        return mp.make_mpc((self.re._mpf_, self.im._mpf_))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_strings(self) -> tuple[str, str]:
        """Decimal strings with exactly ``prec`` significant digits each."""
        return format_mpf(self.re, self.prec), format_mpf(self.im, self.prec)

    def to_rational(self) -> RationalComplex:
        """Exact rational value of the decimal digits of this number."""
        re, im = self.to_strings()
        return RationalComplex(parse_decimal(re), parse_decimal(im))

    def __str__(self):
        re, im = self.to_strings()
        if im.startswith("-"):
            return f"{re}-{im[1:]}i"
        return f"{re}+{im}i"

    # -- arithmetic -------------------------------------------------------

    def _binary(self, other, op) -> "PrecComplex":
        if not isinstance(other, PrecComplex):
            other = PrecComplex.make(other, self.prec)
        prec = min(self.prec, other.prec)
        with mp.workdps(prec):
            v = op(self.mpc, other.mpc)
            return PrecComplex(+v.real, +v.imag, prec)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PrecComplex) and other.is_zero():
            raise DomainError("division by zero")
        return self._binary(other, lambda x, y: x / y)

    def __neg__(self):
        return PrecComplex(_neg(self.re), _neg(self.im), self.prec)

    def __abs__(self) -> mpmath.mpf:
        with mp.workdps(self.prec):
            return mpmath.fabs(self.mpc)

    def conjugate(self) -> "PrecComplex":
        return PrecComplex(self.re, _neg(self.im), self.prec)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def arg(self) -> mpmath.mpf:
        """Principal argument in (-pi, pi]."""
        if self.is_zero():
            raise DomainError("Arg(0) is undefined")
        with mp.workdps(self.prec):
            return mpmath.atan2(self.im, self.re)


def _neg(x: mpmath.mpf) -> mpmath.mpf:
    # exact sign flip; unary minus would round to the global precision
    return mp.make_mpf(mpf_neg(x._mpf_))


def _to_mpf(value, prec: int) -> mpmath.mpf:
    if isinstance(value, str):
        return mpf_from_fraction(parse_decimal(value), prec)
    if isinstance(value, (int, Fraction)):
        return mpf_from_fraction(Fraction(value), prec)
    with mp.workdps(prec):
        return +mpmath.mpf(value)


def cx_log_principal(w: PrecComplex) -> PrecComplex:
    """ln|w| + i Arg(w), Arg in (-pi, pi]."""
    if w.is_zero():
        raise DomainError("Log(0) is undefined")
    with mp.workdps(w.prec):
        v = mpmath.log(w.mpc)
        return PrecComplex(+v.real, +v.imag, w.prec)


def cx_exp(w: PrecComplex) -> PrecComplex:
    """e^w.  Raises ExpOverflowError when |Re w| exceeds the guard."""
    with mp.workdps(w.prec):
        if mpmath.fabs(w.re) > EXP_GUARD:
            raise ExpOverflowError(f"|Re w| = {mpmath.nstr(w.re, 8)} beyond exp guard")
        v = mpmath.exp(w.mpc)
        return PrecComplex(+v.real, +v.imag, w.prec)


def reprecision(w: PrecComplex, new_prec: int) -> PrecComplex:
    """Rationalize the decimal digits of ``w`` and re-expand at ``new_prec``.

    Lowering the precision rounds half-even on the decimal digits; raising
    it pads with zeros (the exact rational is simply carried further).
    """
    check_prec(new_prec)
    if new_prec == w.prec:
        return w
    parts = []
    for s in w.to_strings():
        d = decimal.Decimal(s)
        if new_prec < w.prec:
            d = round_decimal(d, new_prec)
        parts.append(Fraction(d))
    return RationalComplex(*parts).to_prec(new_prec)

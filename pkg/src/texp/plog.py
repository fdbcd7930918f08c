"""The composite logarithm pLog, its derivative and the T1/T2 residuals.

pLog(w, n, m; z) = (1/L) * (Log((Log w + 2 n pi i) / L) + 2 m pi i),  L = Log z,

with both logarithms principal.  Its fixed points are the roots of
T2(w; z) = w - z^(z^w).

Functions suffixed ``_raw`` work on bare ``mpmath.mpc`` values at whatever
precision the caller's ``workdps`` block sets; the solver uses them in its
inner loop.  The public functions take and return ``PrecComplex``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import DomainError, ExpOverflowError
from .mpcx import EXP_GUARD, PrecComplex, check_prec, cx_exp
from .regions import RegionTag, classify
from .zspec import ZSpec


class Marker(enum.Enum):
    OVERFLOW = "overflow"

    def __str__(self):
        return self.value


OVERFLOW = Marker.OVERFLOW


@dataclass(frozen=True)
class SheetIndex:
    n: int
    m: int

    def __post_init__(self):
        for v in (self.n, self.m):
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError("sheet indices must be ints")


@dataclass(frozen=True)
class ZContext:
    """Base z with its principal logarithm a + bi at ``prec`` digits."""

    z: ZSpec
    prec: int
    a: mpmath.mpf
    b: mpmath.mpf
    c: mpmath.mpf
    region: RegionTag

    @classmethod
    def create(cls, z: ZSpec, prec: int = 50) -> "ZContext":
        return _make_context(z, check_prec(prec))

    def at_prec(self, prec: int) -> "ZContext":
        if prec == self.prec:
            return self
        return _make_context(self.z, check_prec(prec))

    @property
    def L(self) -> mpmath.mpc:
        return mp.make_mpc((self.a._mpf_, self.b._mpf_))

    @property
    def logz(self) -> PrecComplex:
        return PrecComplex(self.a, self.b, self.prec)

    def conjugate(self) -> "ZContext":
        return _make_context(self.z.conjugate(), self.prec)

    def __repr__(self):
        return f"ZContext(z={self.z.label}, prec={self.prec}, region={self.region})"


@functools.lru_cache(maxsize=256)
def _make_context(z: ZSpec, prec: int) -> ZContext:
    with mp.workdps(prec):
        a = z.log_modulus(prec)
        b = z.arg(prec)
        c = mpmath.sqrt(a * a + b * b)
    return ZContext(z, prec, a, b, c, classify(z))


def context(z: ZSpec | str, prec: int = 50, theta_pi: str = "0") -> ZContext:
    if isinstance(z, str):
        z = ZSpec.parse(z, theta_pi)
    return ZContext.create(z, prec)


# -- raw kernels (caller sets workdps) --------------------------------------

def inner_log_raw(w: mpmath.mpc, n: int) -> mpmath.mpc:
    """Log w + 2 n pi i."""
    if not w:
        raise DomainError("Log(0) is undefined")
    lw = mpmath.log(w)
    return mpmath.mpc(lw.real, lw.imag + 2 * n * mpmath.pi)


def plog_raw(w: mpmath.mpc, n: int, m: int, L: mpmath.mpc) -> mpmath.mpc:
    inner = inner_log_raw(w, n) / L
    if not inner:
        raise DomainError("inner logarithm singular (w = 1, n = 0)")
    v = mpmath.log(inner)
    return mpmath.mpc(v.real, v.imag + 2 * m * mpmath.pi) / L


def plog_deriv_raw(w: mpmath.mpc, n: int, L: mpmath.mpc) -> mpmath.mpc:
    den = w * L * inner_log_raw(w, n)
    if not den:
        raise DomainError("pLog derivative singular")
    return 1 / den


# -- public API ---------------------------------------------------------------

def _wrap(v: mpmath.mpc, prec: int) -> PrecComplex:
    return PrecComplex(+v.real, +v.imag, prec)


def plog(w: PrecComplex, idx: SheetIndex, ctx: ZContext) -> PrecComplex:
    """pLog(w, n, m; z) at the precision of ``w``."""
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        return _wrap(plog_raw(w.mpc, idx.n, idx.m, c.L), w.prec)


def plog_deriv(w: PrecComplex, n: int, ctx: ZContext) -> PrecComplex:
    """1 / (w Log z (Log w + 2 n pi i)); independent of m."""
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        return _wrap(plog_deriv_raw(w.mpc, n, c.L), w.prec)


def t1_plog(w: PrecComplex, n: int, ctx: ZContext) -> PrecComplex:
    """(Log w + 2 n pi i) / Log z, whose fixed points solve w = z^w."""
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        return _wrap(inner_log_raw(w.mpc, n) / c.L, w.prec)


def t2_exp_residual(w: PrecComplex, ctx: ZContext) -> PrecComplex | Marker:
    """w - exp(L exp(w L)), or OVERFLOW when an exponent exceeds the guard."""
    c = ctx.at_prec(w.prec)
    L = c.logz
    try:
        inner = cx_exp(w * L)
        outer = cx_exp(L * inner)
    except ExpOverflowError:
        return OVERFLOW
    return w - outer


def t2_exp_residual_raw(w: mpmath.mpc, L: mpmath.mpc) -> mpmath.mpc | Marker:
    e1 = w * L
    if abs(e1.real) > EXP_GUARD:
        return OVERFLOW
    e2 = L * mpmath.exp(e1)
    if abs(e2.real) > EXP_GUARD:
        return OVERFLOW
    return w - mpmath.exp(e2)

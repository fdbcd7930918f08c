"""Stitched pLog stacks.

Each stack maps a requested sheet {n, m} and a point w to the plain pLog
sheet that is actually evaluated there, so that the resulting surface has a
single cut along the negative (N) or positive (P) real axis.  D is plain
pLog.

A-side stacks (Arg z > 0, and the real regions 1D-1F) are written out
directly.  The spiral cut trace of leaf n is r = e^((a/b)(theta + 2 n pi));
it lies in the cut domain only where theta + 2 n pi < 0, so only leaf 0
(lower half-plane) and the negative leaves are affected.  Crossing it
inward drops the branch number by one.

B-side stacks are obtained by reflection:
pLog(w, n, m; conj z) = conj(pLog(conj w, -n, -m; z)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp

from .errors import ConfigurationError
from .mpcx import PrecComplex
from .plog import SheetIndex, ZContext, plog_raw
from .regions import RegionTag

R = RegionTag


class CutSide(enum.Enum):
    N = "N"
    P = "P"
    D = "D"


_VALID = {
    R.R1A: {CutSide.N, CutSide.D}, R.R1B: {CutSide.N, CutSide.D}, R.R1C: {CutSide.N, CutSide.D},
    R.R1D: {CutSide.N, CutSide.D}, R.R1E: {CutSide.N, CutSide.D}, R.R1F: {CutSide.N, CutSide.D},
    R.R2A: {CutSide.N}, R.R2B: {CutSide.N},
    R.R3A: {CutSide.N, CutSide.P}, R.R3B: {CutSide.N, CutSide.P},
    R.R4A: {CutSide.N}, R.R4B: {CutSide.N, CutSide.P},
}


@dataclass(frozen=True)
class StackId:
    region: RegionTag
    cut_side: CutSide

    @property
    def name(self) -> str:
        if self.cut_side is CutSide.D:
            return "D"
        return f"{self.region.value}{self.cut_side.value}"

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, text: str, region: RegionTag) -> "StackId":
        text = text.strip().upper()
        if text == "D":
            return cls(region, CutSide.D)
        return cls(RegionTag(text[:-1]), CutSide(text[-1]))

    @property
    def valid(self) -> bool:
        return self.cut_side in _VALID[self.region]


def check_stack(stack: StackId, ctx: ZContext) -> None:
    if stack.region is not ctx.region and stack.cut_side is not CutSide.D:
        raise ConfigurationError(f"stack {stack} does not belong to region {ctx.region}")
    if not stack.valid:
        raise ConfigurationError(f"stack {stack} is not defined")


# -- sheet maps ---------------------------------------------------------------
# Each takes r = |w|, th = Arg w, the requested (n, m), and a spiral-radius
# function rad(th, n); returns the plain pLog sheet (n', m').

Radius = Callable[[mpmath.mpf, int], mpmath.mpf]


def _sheet_real_lower(r, th, n, m, rad):
    """Regions 1D-1F: segment cut (1, inf) on leaf 0, the whole trace on n < 0."""
    if n > 0:
        return n, m
    if n == 0:
        return (n, m) if th >= 0 else (n, m - 1)
    return n, m - 1


def _sheet_a_n(r, th, n, m, rad):
    """Cut kept on the negative real axis (2AN generalised to 3AN, 4AN)."""
    if n > 0:
        return n, m
    if n == 0:
        if th >= 0:
            return n, m
        return (n, m) if r > rad(th, 0) else (n, m - 1)
    return (n, m) if r >= rad(th, n) else (n, m - 1)


def _sheet_a_p(r, th, n, m, rad):
    """Cut moved to the positive real axis (3AP generalised to 4AP)."""
    if n >= 0:
        return (n, m) if th >= 0 else (n + 1, m)
    if th < 0:
        return (n + 1, m) if r >= rad(th, n + 1) else (n + 1, m - 1)
    return (n, m) if r >= rad(th, n) else (n, m - 1)


def _plain(r, th, n, m, rad):
    return n, m


def _radius_fn(a: mpmath.mpf, b: mpmath.mpf) -> Radius:
    k = a / b

    def rad(th, n):
        return mpmath.exp(k * (th + 2 * n * mpmath.pi))

    return rad


_A_MAP = {CutSide.N: _sheet_a_n, CutSide.P: _sheet_a_p}


def effective_sheet_raw(stack: StackId, w: mpmath.mpc, n: int, m: int,
                        ctx: ZContext) -> tuple[int, int]:
    """Plain pLog sheet that ``stack`` evaluates at ``w`` for request (n, m).

    Runs at the caller's workdps; ``ctx`` should match it.
    """
    side, region = stack.cut_side, stack.region
    if side is CutSide.D or region in (R.R1A, R.R1B, R.R1C):
        return n, m
    r = abs(w)
    th = mpmath.arg(w)
    if region in (R.R1D, R.R1E, R.R1F):
        return _sheet_real_lower(r, th, n, m, None)
    if not region.is_lower:
        return _A_MAP[side](r, th, n, m, _radius_fn(ctx.a, ctx.b))
    # mirror: evaluate the A-side map at conj w on conj z
    n2, m2 = _A_MAP[side](r, -th, -n, -m, _radius_fn(ctx.a, -ctx.b))
    return -n2, -m2


def effective_sheet(stack: StackId, w: PrecComplex, idx: SheetIndex, ctx: ZContext) -> SheetIndex:
    check_stack(stack, ctx)
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        return SheetIndex(*effective_sheet_raw(stack, w.mpc, idx.n, idx.m, c))


def stack_eval_raw(stack: StackId, w: mpmath.mpc, n: int, m: int, ctx: ZContext) -> mpmath.mpc:
    n2, m2 = effective_sheet_raw(stack, w, n, m, ctx)
    return plog_raw(w, n2, m2, ctx.L)


def stack_eval(stack: StackId, w: PrecComplex, idx: SheetIndex, ctx: ZContext) -> PrecComplex:
    check_stack(stack, ctx)
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        v = stack_eval_raw(stack, w.mpc, idx.n, idx.m, c)
        return PrecComplex(+v.real, +v.imag, w.prec)


def select_stack(region: RegionTag, idx: SheetIndex, purpose: str = "general") -> StackId:
    """Stack prescribed for sheet ``idx`` of ``region``.

    ``purpose`` is ``"general"`` or ``"realAxisRoot"``; the latter only
    matters in 1D-1F, where real roots sit on the N-stack cut and are
    iterated with plain pLog instead.
    """
    if purpose not in ("general", "realAxisRoot"):
        raise ValueError(f"unknown purpose {purpose!r}")
    if region in (R.R1D, R.R1E, R.R1F) and purpose == "realAxisRoot":
        return StackId(region, CutSide.D)
    if region is R.R3A:
        return StackId(region, CutSide.N if idx.n >= 0 else CutSide.P)
    if region is R.R3B:
        return StackId(region, CutSide.N if idx.n <= 0 else CutSide.P)
    if region is R.R4B:
        return StackId(region, CutSide.P if idx.n > 0 else CutSide.N)
    return StackId(region, CutSide.N)

"""Region classification of z and the secondary branch-cut geometry of pLog."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import mpmath
from mpmath import mp

from .errors import DomainError
from .mpcx import PrecComplex
from .zspec import ZSpec

if TYPE_CHECKING:
    from .plog import ZContext


class RegionTag(enum.Enum):
    R1A = "1A"
    R1B = "1B"
    R1C = "1C"
    R1D = "1D"
    R1E = "1E"
    R1F = "1F"
    R2A = "2A"
    R2B = "2B"
    R3A = "3A"
    R3B = "3B"
    R4A = "4A"
    R4B = "4B"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "RegionTag":
        return cls(text.strip().upper())

    @property
    def is_real(self) -> bool:
        return self.value[0] == "1"

    @property
    def is_lower(self) -> bool:
        """B subregions (Arg z < 0)."""
        return self.value[0] != "1" and self.value[1] == "B"

    @property
    def mirror(self) -> "RegionTag":
        if self.is_real:
            return self
        return RegionTag(self.value[0] + ("A" if self.is_lower else "B"))


_INV_E = (Fraction(1), -1)    # ln|z| = 1/e
_MINUS_E = (Fraction(-1), 1)  # ln|z| = -e


def classify(z: ZSpec) -> RegionTag:
    """Region tag of an admissible z, decided exactly where z is exact."""
    s_mod = z.modulus_vs_one()
    if z.is_positive_real():
        if s_mod > 0:
            s = z.compare_log_modulus(*_INV_E)
            return RegionTag.R1A if s > 0 else RegionTag.R1B if s == 0 else RegionTag.R1C
        s = z.compare_log_modulus(*_MINUS_E)
        return RegionTag.R1D if s > 0 else RegionTag.R1E if s == 0 else RegionTag.R1F
    upper = z.arg_sign() > 0  # includes Arg z = pi
    if s_mod == 0:
        return RegionTag.R2A if upper else RegionTag.R2B
    if s_mod < 0:
        return RegionTag.R3A if upper else RegionTag.R3B
    return RegionTag.R4A if upper else RegionTag.R4B


@dataclass(frozen=True)
class CutEvaluation:
    in_domain: bool
    trace_value: mpmath.mpf
    on_cut: bool


def secondary_cut(w: PrecComplex, n: int, ctx: "ZContext") -> CutEvaluation:
    """Evaluate the cut domain a ln r + b k < 0 and trace a k - b ln r at w.

    ``k = Arg w + 2 n pi``; ``r = |w|``.
    """
    if w.is_zero():
        raise DomainError("secondary cut undefined at w = 0")
    prec = w.prec
    c = ctx.at_prec(prec)
    with mp.workdps(prec + 5):
        lr = mpmath.log(abs(w.mpc))
        k = w.arg() + 2 * n * mpmath.pi
        dom = c.a * lr + c.b * k
        ak, blr = c.a * k, c.b * lr
        trace = ak - blr
        scale = max(mpmath.mpf(1), abs(ak), abs(blr))
        tol = scale * mpmath.mpf(10) ** (-(prec - 5))
        in_domain = dom < 0
        return CutEvaluation(in_domain, +trace, bool(in_domain and abs(trace) < tol))


def branch_cut_f(theta_w, n: int, ctx: "ZContext", prec: int | None = None) -> mpmath.mpf:
    """Radius of the spiral cut trace, e^((a/b)(theta + 2 n pi))."""
    prec = prec or ctx.prec
    c = ctx.at_prec(prec)
    if not c.b:
        raise DomainError("branch_cut_f needs Arg z != 0")
    with mp.workdps(prec):
        return mpmath.exp((c.a / c.b) * (mpmath.mpf(theta_w) + 2 * n * mpmath.pi))

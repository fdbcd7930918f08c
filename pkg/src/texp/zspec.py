"""Exact descriptions of the base z.

Three forms are accepted:

* polar: rational modulus ``r`` and argument ``theta_pi * pi``;
* exp: modulus ``exp(coef * e**epow)`` with rational ``coef`` and
  ``epow`` in {-1, 0, 1} (covers e^(1/e) and e^(-e) exactly);
* cartesian: rational real and imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import InadmissibleZError


def normalize_theta_pi(t: Fraction) -> Fraction:
    """Reduce an argument (in units of pi) to (-1, 1]."""
    t = Fraction(t)
    return t - 2 * math.ceil((t - 1) / 2)


def parse_rational(text: str) -> Fraction:
    text = text.strip().replace(" ", "")
    if "^" in text:
        base, _, power = text.partition("^")
        return Fraction(base) ** int(power)
    return Fraction(text)


@dataclass(frozen=True)
class ZSpec:
    kind: str
    theta_pi: Fraction = Fraction(0)
    r: Fraction | None = None
    coef: Fraction | None = None
    epow: int = 0
    x: Fraction | None = None
    y: Fraction | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def polar(cls, r, theta_pi=0) -> "ZSpec":
        r = Fraction(r)
        if r <= 0:
            raise InadmissibleZError("modulus must be positive (z = 0 is inadmissible)")
        z = cls("polar", normalize_theta_pi(Fraction(theta_pi)), r=r)
        z._check()
        return z

    @classmethod
    def exp_modulus(cls, coef, epow: int = 0, theta_pi=0) -> "ZSpec":
        """|z| = exp(coef * e**epow)."""
        if epow not in (-1, 0, 1):
            raise ValueError("epow must be -1, 0 or 1")
        z = cls("exp", normalize_theta_pi(Fraction(theta_pi)), coef=Fraction(coef), epow=epow)
        z._check()
        return z

    @classmethod
    def cartesian(cls, x, y=0) -> "ZSpec":
        x, y = Fraction(x), Fraction(y)
        if x == 0 and y == 0:
            raise InadmissibleZError("z = 0 is inadmissible")
        z = cls("cartesian", x=x, y=y)
        z._check()
        return z

    @classmethod
    def parse(cls, r_text: str, theta_pi_text: str = "0") -> "ZSpec":
        """Parse CLI-style input: ``2``, ``1/2``, ``10^12``, ``exp(1/e)``, ``exp(-e)``."""
        theta = parse_rational(theta_pi_text)
        t = r_text.strip().replace(" ", "")
        if t.startswith("exp(") and t.endswith(")"):
            inner = t[4:-1]
            if inner.endswith("e"):
                head = inner[:-1]
                if head in ("", "+"):
                    return cls.exp_modulus(1, 1, theta)
                if head == "-":
                    return cls.exp_modulus(-1, 1, theta)
                if head.endswith("*"):
                    return cls.exp_modulus(parse_rational(head[:-1]), 1, theta)
                if head.endswith("/"):
                    return cls.exp_modulus(parse_rational(head[:-1]), -1, theta)
                raise ValueError(f"cannot parse modulus {r_text!r}")
            return cls.exp_modulus(parse_rational(inner), 0, theta)
        try:
            return cls.polar(parse_rational(t), theta)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InadmissibleZError):
                raise
            raise ValueError(f"cannot parse modulus {r_text!r}") from exc

    def _check(self):
        if self.modulus_vs_one() == 0 and self.arg_sign() == 0 and not self.is_negative_real():
            raise InadmissibleZError("z = 1 is inadmissible (Log z = 0)")

    # -- exact predicates -------------------------------------------------

    def arg_sign(self) -> int:
        if self.kind == "cartesian":
            if self.y != 0:
                return 1 if self.y > 0 else -1
            return 0 if self.x > 0 else 1  # negative real axis: Arg = pi
        if self.theta_pi == 0:
            return 0
        return 1 if self.theta_pi > 0 else -1

    def is_negative_real(self) -> bool:
        if self.kind == "cartesian":
            return self.y == 0 and self.x < 0
        return self.theta_pi == 1

    def is_positive_real(self) -> bool:
        return self.arg_sign() == 0

    def modulus_vs_one(self) -> int:
        """Sign of ln|z|, decided exactly."""
        if self.kind == "polar":
            return (self.r > 1) - (self.r < 1)
        if self.kind == "exp":
            return (self.coef > 0) - (self.coef < 0)
        n2 = self.x * self.x + self.y * self.y
        return (n2 > 1) - (n2 < 1)

    def compare_log_modulus(self, coef: Fraction, epow: int) -> int:
        """Sign of ln|z| - coef * e**epow.

        Exact when both sides share the symbolic form; otherwise decided
        numerically (the two sides are then never equal, as e is
        transcendental).
        """
        if self.kind == "exp" and self.epow == epow:
            return (self.coef > coef) - (self.coef < coef)
        if self.kind == "exp" and self.coef == 0 and coef == 0:
            return 0
        dps = 60
        while True:
            with mp.workdps(dps):
                diff = self.log_modulus(dps) - coef * mpmath.e ** epow
                if abs(diff) > mpmath.mpf(10) ** (-dps + 10):
                    return 1 if diff > 0 else -1
            dps *= 2
            if dps > 2000:
                return 0

    # -- numeric images ---------------------------------------------------

    def log_modulus(self, dps: int) -> mpmath.mpf:
        with mp.workdps(dps + 5):
            if self.kind == "polar":
                v = mpmath.log(mpmath.mpf(self.r.numerator) / self.r.denominator)
            elif self.kind == "exp":
                v = (mpmath.mpf(self.coef.numerator) / self.coef.denominator) * mpmath.e ** self.epow
            else:
                n2 = self.x * self.x + self.y * self.y
                v = mpmath.log(mpmath.mpf(n2.numerator) / n2.denominator) / 2
        with mp.workdps(dps):
            return +v

    def arg(self, dps: int) -> mpmath.mpf:
        with mp.workdps(dps + 5):
            if self.kind == "cartesian":
                v = mpmath.atan2(mpmath.mpf(self.y.numerator) / self.y.denominator,
                                 mpmath.mpf(self.x.numerator) / self.x.denominator)
            else:
                v = mpmath.pi * self.theta_pi.numerator / self.theta_pi.denominator
        with mp.workdps(dps):
            return +v

    def log(self, dps: int) -> mpmath.mpc:
        """Principal Log z at ``dps`` digits."""
        a = self.log_modulus(dps)
        b = self.arg(dps)
        return mp.make_mpc((a._mpf_, b._mpf_))

    def conjugate(self) -> "ZSpec":
        if self.kind == "cartesian":
            return ZSpec.cartesian(self.x, -self.y)
        if self.theta_pi == 1:
            return self
        return ZSpec(self.kind, -self.theta_pi, self.r, self.coef, self.epow)

    # -- text -------------------------------------------------------------

    @property
    def r_text(self) -> str:
        if self.kind == "polar":
            return str(self.r)
        if self.kind == "exp":
            if self.epow == 0:
                return f"exp({self.coef})"
            e_part = "e" if self.epow == 1 else "/e"
            if self.epow == 1:
                head = {Fraction(1): "", Fraction(-1): "-"}.get(self.coef, f"{self.coef}*")
            else:
                head = str(self.coef)
            return f"exp({head}{e_part})"
        return f"|{self.x}+{self.y}i|"

    @property
    def label(self) -> str:
        if self.kind == "cartesian":
            return f"{self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}i"
        if self.theta_pi == 0:
            return self.r_text
        return f"{self.r_text}*exp({self.theta_pi}*pi*i)"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.kind == "polar":
            d.update(rNumer=self.r.numerator, rDenom=self.r.denominator)
        elif self.kind == "exp":
            d.update(logCoefNumer=self.coef.numerator, logCoefDenom=self.coef.denominator,
                     logEpow=self.epow)
        else:
            d.update(xNumer=self.x.numerator, xDenom=self.x.denominator,
                     yNumer=self.y.numerator, yDenom=self.y.denominator)
        if self.kind != "cartesian":
            d.update(thetaPiNumer=self.theta_pi.numerator, thetaPiDenom=self.theta_pi.denominator)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ZSpec":
        kind = d["kind"]
        if kind == "cartesian":
            return cls.cartesian(Fraction(d["xNumer"], d["xDenom"]), Fraction(d["yNumer"], d["yDenom"]))
        theta = Fraction(d["thetaPiNumer"], d["thetaPiDenom"])
        if kind == "polar":
            return cls.polar(Fraction(d["rNumer"], d["rDenom"]), theta)
        return cls.exp_modulus(Fraction(d["logCoefNumer"], d["logCoefDenom"]), d["logEpow"], theta)

    def __str__(self):
        return self.label


E_TO_INV_E = ZSpec.exp_modulus(1, -1)   # e^(1/e), Region 1B
E_TO_MINUS_E = ZSpec.exp_modulus(-1, 1)  # e^(-e), Region 1E

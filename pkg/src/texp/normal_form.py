"""Normal-form geometry: rotation, the separated auxiliary functions and
iteration seeds.

In the rotated (normal) frame the real part of L z^w is
e^(c x) (a cos(c y) - b sin(c y)) and the imaginary part is
e^(c x) (a sin(c y) + b cos(c y)), with c = |L|.  Solving each for x
gives branch_f and leaf_f.  The rotation angle is gamma = Arg L.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp

from . import dgrid
from .errors import DomainError, SeedError
from .mpcx import PrecComplex
from .plog import SheetIndex, ZContext
from .regions import RegionTag
from .stacks import CutSide, StackId, select_stack

R = RegionTag


@dataclass(frozen=True)
class BranchFrame:
    alpha: mpmath.mpf                   # inclination arctan(a/b)
    beta: mpmath.mpf                    # rotation angle used for normal form
    c: mpmath.mpf
    lobe_width: mpmath.mpf              # eps = pi / c
    branch_width: mpmath.mpf            # delta = 3 pi / (2 c)
    branch_asymptote_offset: mpmath.mpf  # t
    leaf_asymptote_offset: mpmath.mpf    # u
    gamma: mpmath.mpf                   # Arg L; congruent to beta mod 2 pi
    prec: int

    def branch_mid(self, m: int) -> mpmath.mpf:
        """Ordinate (normal frame) of the middle of branch m."""
        with mp.workdps(self.prec):
            return (2 * m * mpmath.pi - self.gamma) / self.c

    def branch_asymptotes(self, m: int) -> tuple[mpmath.mpf, mpmath.mpf]:
        with mp.workdps(self.prec):
            y = self.branch_mid(m)
            h = self.lobe_width / 2
            return y - h, y + h

    def leaf_asymptote(self, k: int) -> mpmath.mpf:
        """k-th leaf asymptote ordinate, c y = -u + k pi."""
        with mp.workdps(self.prec):
            return (-self.leaf_asymptote_offset + k * mpmath.pi) / self.c


def branch_frame(ctx: ZContext) -> BranchFrame:
    a, b, c = ctx.a, ctx.b, ctx.c
    with mp.workdps(ctx.prec):
        pi = +mpmath.pi
        if b:
            alpha = mpmath.atan(a / b)
        else:
            alpha = pi / 2 if a > 0 else -pi / 2
        # Arg L.  Equals pi/2 - alpha when b >= 0 and -pi/2 - alpha when b < 0.
        gamma = mpmath.atan2(b, a)
        beta = -pi if ctx.region in (R.R1D, R.R1E, R.R1F) else gamma
        u = mpmath.atan(b / a) if a else (pi / 2 if b > 0 else -pi / 2)
        eps = pi / c
        return BranchFrame(alpha, beta, c, eps, 3 * eps / 2, alpha, u, gamma, ctx.prec)


def rotate(p: tuple, angle) -> tuple:
    """Counter-clockwise rotation of the point p by ``angle``.

    ``rotate(p, -beta)`` is the map from normal to base coordinates.
    """
    x, y = p
    ca, sa = mpmath.cos(angle), mpmath.sin(angle)
    return x * ca - y * sa, x * sa + y * ca


def to_normal(p: tuple, frame: BranchFrame) -> tuple:
    return rotate(p, frame.beta)


def to_base(p: tuple, frame: BranchFrame) -> tuple:
    return rotate(p, -frame.beta)


def branch_f(y, psi, ctx: ZContext, prec: int | None = None) -> mpmath.mpf:
    """x with e^(c x) (a cos(c y) - b sin(c y)) = psi."""
    prec = prec or ctx.prec
    k = ctx.at_prec(prec)
    with mp.workdps(prec):
        cy = k.c * y
        den = k.a * mpmath.cos(cy) - k.b * mpmath.sin(cy)
        if not den or psi / den <= 0:
            raise DomainError("branch_f: nonpositive logarithm argument")
        return mpmath.log(psi / den) / k.c


def leaf_f(y, phi, ctx: ZContext, prec: int | None = None) -> mpmath.mpf:
    """x with e^(c x) (a sin(c y) + b cos(c y)) = phi."""
    prec = prec or ctx.prec
    k = ctx.at_prec(prec)
    with mp.workdps(prec):
        cy = k.c * y
        den = k.a * mpmath.sin(cy) + k.b * mpmath.cos(cy)
        if not den or phi / den <= 0:
            raise DomainError("leaf_f: nonpositive logarithm argument")
        return mpmath.log(phi / den) / k.c


def envelope_psi(m: int, frame: BranchFrame) -> mpmath.mpf:
    """psi whose branch_f curve envelopes the roots of branch m.

    At a root ln|w| equals the real part of L z^w.  A root with |w| > 1 in
    the strip of branch m has |w| >= |y_m| - eps/2, so psi = ln(|y_m| - eps/2)
    puts every such root on or inside the curve.
    """
    with mp.workdps(frame.prec):
        small = frame.lobe_width / 2
        inner = abs(frame.branch_mid(m)) - small
        if inner <= mpmath.e:
            return small
        return max(mpmath.log(inner), small)


def seed_psi(m: int, frame: BranchFrame) -> mpmath.mpf:
    with mp.workdps(frame.prec):
        y = abs(frame.branch_mid(m))
        small = frame.lobe_width / 2
        return y if y > small else small


def seed(idx: SheetIndex, ctx: ZContext, prec: int | None = None) -> PrecComplex:
    """Bulb-head seed for branch ``idx.m`` (the leaf index is not used)."""
    prec = prec or ctx.prec
    guard = prec + 10
    k = ctx.at_prec(guard)
    frame = branch_frame(k)
    y = frame.branch_mid(idx.m)
    candidates = [seed_psi(idx.m, frame), frame.lobe_width / 2]
    for psi in candidates:
        try:
            x = branch_f(y, psi, k, guard)
        except DomainError:
            continue
        with mp.workdps(guard):
            bx, by = to_base((x, y), frame)
        with mp.workdps(prec):
            return PrecComplex(+bx, +by, prec)
    raise SeedError(f"no admissible seed for branch {idx.m}")


# -- multi-root sheet seeds -----------------------------------------------------

@dataclass(frozen=True)
class SubSeed:
    p: int
    seed: PrecComplex
    relaxation: int
    stack: StackId


def p_order_key(v: complex, real_tol: float = 1e-9):
    """Non-real roots first by descending Im, then real roots by descending Re."""
    if abs(v.imag) > real_tol:
        return (0, -v.imag, -v.real)
    return (1, -v.real, 0.0)


def _real_t2(x: np.ndarray, zr: float) -> np.ndarray:
    with np.errstate(all="ignore"):
        return x - zr ** (zr ** x)


def _real_brackets(ctx: ZContext) -> list[mpmath.mpf]:
    """Positive real roots of x - z^(z^x) for real z, refined at ctx.prec."""
    zr = float(mpmath.exp(ctx.a))
    if zr < 1:
        xs = np.linspace(1e-9, 1.0, 200001)
    else:
        xs = np.geomspace(1e-6, 1e6, 400001)
    f = _real_t2(xs, zr)
    s = np.sign(f)
    idx = np.nonzero(np.isfinite(f[:-1]) & np.isfinite(f[1:]) & (s[:-1] * s[1:] < 0))[0]
    roots = []
    with mp.workdps(ctx.prec):
        L = ctx.a
        def g(x):
            return x - mpmath.exp(L * mpmath.exp(L * x))
        for i in idx:
            lo, hi = mpmath.mpf(xs[i]), mpmath.mpf(xs[i + 1])
            roots.append(mpmath.findroot(g, (lo, hi), solver="anderson"))
    return roots


def _scan_attractors(ctx: ZContext, stack, limit: int = 3) -> list[complex]:
    frame = branch_frame(ctx.at_prec(20))
    head = complex(seed(SheetIndex(0, 0), ctx, 15))
    eps = float(frame.lobe_width)
    found: list[tuple[complex, int]] = []
    for centre, size in ((head, 4 * eps), (0j, 20.0)):
        g = dgrid.grid(centre, size, size, 60, 60)
        w, ok = dgrid.newton_iterate(stack, g, 0, 0, ctx)
        for v, k in dgrid.cluster(w[ok], 1e-6):
            for i, (u, ku) in enumerate(found):
                if abs(u - v) < 1e-6:
                    found[i] = (u, ku + k)
                    break
            else:
                found.append((v, k))
    found.sort(key=lambda t: -t[1])
    return [v for v, _ in found[:limit]]


def sub_seeds(region: RegionTag, ctx: ZContext, prec: int | None = None) -> list[SubSeed]:
    """p-indexed seeds for the roots sharing sheet {0, 0}."""
    if region is not ctx.region:
        raise ValueError(f"context is in region {ctx.region}, not {region}")
    prec = prec or ctx.prec
    k = ctx.at_prec(max(prec, 20))
    general = select_stack(region, SheetIndex(0, 0))
    plain = StackId(region, CutSide.D)
    items: list[tuple[complex, PrecComplex, int, StackId]] = []

    def add(v, relaxation, stack):
        with mp.workdps(prec):
            pc = PrecComplex.make(mpmath.mpc(v), prec)
        items.append((complex(pc), pc, relaxation, stack))

    if region is R.R1A:
        head = seed(SheetIndex(0, 0), k, prec)
        with mp.workdps(prec):
            h = mpmath.pi / k.c / 2
            add(head.mpc + mpmath.mpc(0, h), 1, general)
            add(head.mpc - mpmath.mpc(0, h), 1, general)
    elif region is R.R1B:
        add(mpmath.mpf(27) / 10, 2, general)
    elif region is R.R1E:
        add(mpmath.mpf(37) / 100, 3, plain)
    elif region in (R.R1C, R.R1F):
        stack = general if region is R.R1C else plain
        for x in _real_brackets(k):
            add(x, 1, stack)
    elif region is R.R1D:
        head = seed(SheetIndex(0, 0), k, prec)
        add(head.mpc, 1, general)
        add(head.conjugate().mpc, 1, plain)
        for x in _real_brackets(k):
            add(x, 1, plain)
    else:
        for v in _scan_attractors(k, general):
            add(v, 1, general)
    items.sort(key=lambda t: p_order_key(t[0]))
    return [SubSeed(p, pc, relax, st) for p, (_, pc, relax, st) in enumerate(items, start=1)]

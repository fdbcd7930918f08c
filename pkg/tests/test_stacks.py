"""Stitched-stack behaviour: direct-iterator fidelity, seams and the single-cut property."""

import math
import random

import mpmath
import numpy as np
import pytest

from texp import (ConfigurationError, CutSide, PrecComplex, RegionTag, SheetIndex, StackId,
                  ZContext, ZSpec, branch_cut_f, plog, select_stack, stack_eval)
from texp import dgrid
from texp.stacks import effective_sheet_raw, stack_eval_raw

from conftest import REGION_Z

R = RegionTag


# -- straight-line versions of three stitched iterators, kept apart from the stack code

def direct_1dn(w, n, m, z):
    if n == 0:
        if w.arg() >= 0:
            return plog(w, SheetIndex(n, m), z)
        return plog(w, SheetIndex(n, m - 1), z)
    if n < 0:
        return plog(w, SheetIndex(n, m - 1), z)
    return plog(w, SheetIndex(n, m), z)


def direct_2an(w, n, m, z):
    if n == 0:
        if w.arg() >= 0:
            return plog(w, SheetIndex(n, m), z)
        if abs(w) > 1:
            return plog(w, SheetIndex(n, m), z)
        return plog(w, SheetIndex(n, m - 1), z)
    if n > 0:
        return plog(w, SheetIndex(n, m), z)
    if abs(w) >= 1:
        return plog(w, SheetIndex(n, m), z)
    return plog(w, SheetIndex(n, m - 1), z)


def direct_3ap(w, n, m, z):
    r, a = abs(w), w.arg()
    if n >= 0:
        if a >= 0:
            return plog(w, SheetIndex(n, m), z)
        return plog(w, SheetIndex(n + 1, m), z)
    if a < 0:
        cut = branch_cut_f(a, n + 1, z, w.prec)
        if r >= cut:
            return plog(w, SheetIndex(n + 1, m), z)
        return plog(w, SheetIndex(n + 1, m - 1), z)
    cut = branch_cut_f(a, n, z, w.prec)
    if r >= cut:
        return plog(w, SheetIndex(n, m), z)
    return plog(w, SheetIndex(n, m - 1), z)


def _random_points(rng, count, prec, special):
    pts = []
    for i in range(count):
        k = i % 5
        if k == 0 and special:
            pts.append(special[rng.randrange(len(special))])
            continue
        r = 10 ** rng.uniform(-2, 2)
        th = rng.uniform(-math.pi, math.pi)
        if k == 1:
            th = rng.choice([0.0, math.pi, -math.pi / 2, math.pi / 2])
        pts.append(PrecComplex.make(r * math.cos(th), prec, r * math.sin(th)))
    return pts


@pytest.mark.parametrize("name, z, direct", [
    ("1DN", ZSpec.polar("1/2"), direct_1dn),
    ("2AN", ZSpec.polar(1, "1/3"), direct_2an),
    ("3AP", ZSpec.polar("9/10", "1/4"), direct_3ap),
])
def test_direct_iterator_fidelity(name, z, direct):
    prec = 20
    ctx = ZContext.create(z, prec)
    stack = StackId.parse(name, ctx.region)
    rng = random.Random(name)
    special = [PrecComplex.make(v, prec, u) for v, u in
               ((1, 0), (2, 0), ("0.5", 0), (0, -1), (0, 1), (-1, 0), (0, -2), ("0.6", "-0.8"))]
    for w in _random_points(rng, 10_000, prec, special):
        n, m = rng.randint(-4, 4), rng.randint(-4, 4)
        if n == 0 and w.re == 1 and w.im == 0:
            continue
        assert stack_eval(stack, w, SheetIndex(n, m), ctx) == direct(w, n, m, ctx), (w, n, m)


def test_stack_examples():
    ctx = ZContext.create(ZSpec.polar("1/2"), 30)
    s = StackId(R.R1D, CutSide.N)
    w = PrecComplex.make(1, 30, 1)
    assert stack_eval(s, w, SheetIndex(0, 0), ctx) == plog(w, SheetIndex(0, 0), ctx)
    w = PrecComplex.make(1, 30, -1)
    assert stack_eval(s, w, SheetIndex(0, 0), ctx) == plog(w, SheetIndex(0, -1), ctx)
    ctx = ZContext.create(ZSpec.polar(1, "1/3"), 30)
    w = PrecComplex.make(0, 30, -2)
    assert stack_eval(StackId(R.R2A, CutSide.N), w, SheetIndex(0, 0), ctx) == \
        plog(w, SheetIndex(0, 0), ctx)


def test_select_stack_examples():
    assert select_stack(R.R1E, SheetIndex(0, 0), "realAxisRoot").name == "D"
    assert select_stack(R.R3A, SheetIndex(-2, 0)).name == "3AP"
    assert select_stack(R.R3A, SheetIndex(0, 0)).name == "3AN"
    assert select_stack(R.R1A, SheetIndex(5, 3)).name == "1AN"
    assert select_stack(R.R3B, SheetIndex(2, 0)).name == "3BP"
    assert select_stack(R.R3B, SheetIndex(-2, 0)).name == "3BN"
    assert select_stack(R.R4B, SheetIndex(1, 0)).name == "4BP"
    assert select_stack(R.R2B, SheetIndex(1, 0)).name == "2BN"
    assert select_stack(R.R1A, SheetIndex(0, 0), "realAxisRoot").name == "1AN"


def test_invalid_pairings():
    ctx = ZContext.create(ZSpec.polar(1, "1/3"), 20)
    w = PrecComplex.make(2, 20)
    with pytest.raises(ConfigurationError):
        stack_eval(StackId(R.R2A, CutSide.P), w, SheetIndex(0, 0), ctx)
    with pytest.raises(ConfigurationError):
        stack_eval(StackId(R.R3A, CutSide.N), w, SheetIndex(0, 0), ctx)
    assert not StackId(R.R4A, CutSide.P).valid
    assert StackId(R.R4B, CutSide.P).valid


# -- seam continuity -----------------------------------------------------------------

SEAM_PREC = 60
STITCHED = [(tag, side) for tag in REGION_Z for side in (CutSide.N, CutSide.P)
            if StackId(R(tag), side).valid]
ANGLES = [-3.0, -2.2, -1.4, -0.6, -0.1, 0.1, 0.6, 1.4, 2.2, 3.0]


def _a_side_seams(tag, side, n, a, b):
    """Former-cut points (w0, how) of the A-side sheet map for request n."""
    out = []
    real = R(tag).is_real
    if real:
        if side is CutSide.N and n == 0 and a < 0:
            out += [(mpmath.mpf(r), "angular") for r in (1.5, 3, 10)]
        return out
    k = a / b

    def spiral(th, leaf):
        return mpmath.exp(k * (th + 2 * leaf * mpmath.pi))

    if side is CutSide.N:
        if n == 0:
            out += [(spiral(t, 0) * mpmath.expj(t), "radial") for t in ANGLES if t < 0]
        elif n < 0:
            out += [(spiral(t, n) * mpmath.expj(t), "radial") for t in ANGLES]
    else:
        out += [(-mpmath.mpf(r), "angular") for r in (0.3, 1, 4)]
        if n < 0:
            out += [(spiral(t, n + 1) * mpmath.expj(t), "radial") for t in ANGLES if t < 0]
            out += [(spiral(t, n) * mpmath.expj(t), "radial") for t in ANGLES if t > 0]
    return [(w, how) for w, how in out if mpmath.mpf("0.01") < abs(w) < 100]


def seam_points(tag, side, n, ctx):
    lower = R(tag).is_lower
    b = -ctx.b if lower else ctx.b
    pts = _a_side_seams(tag, side, -n if lower else n, ctx.a, b)
    if lower:
        pts = [(mpmath.conj(w), how) for w, how in pts]
    return pts


@pytest.mark.parametrize("tag, side", STITCHED, ids=lambda v: getattr(v, "value", v))
def test_seam_continuity(tag, side):
    ctx = ZContext.create(REGION_Z[tag], 30).at_prec(SEAM_PREC)
    stack = StackId(R(tag), side)
    tol = mpmath.mpf(10) ** -(30 - 3)
    seams = 0
    with mpmath.workdps(SEAM_PREC):
        delta = mpmath.mpf(10) ** -45
        for n in range(-3, 4):
            for m in range(-3, 4):
                for w0, how in seam_points(tag, side, n, ctx):
                    if how == "radial":
                        wp, wm = w0 * (1 + delta), w0 * (1 - delta)
                    else:
                        wp, wm = w0 * mpmath.expj(delta), w0 * mpmath.expj(-delta)
                    sp = effective_sheet_raw(stack, wp, n, m, ctx)
                    sm = effective_sheet_raw(stack, wm, n, m, ctx)
                    assert sp != sm, f"{w0} is not a seam of {stack.name} {n},{m}"
                    fp = stack_eval_raw(stack, wp, n, m, ctx)
                    fm = stack_eval_raw(stack, wm, n, m, ctx)
                    assert abs(fp - fm) < tol, (stack.name, n, m, w0)
                    seams += 1
    if not (R(tag) in (R.R1A, R.R1B, R.R1C)):
        assert seams > 0


# -- single-cut property ---------------------------------------------------------------
# Shifting m only adds 2 pi i m / L on every stack, so continuity is checked by
# walking paths at m = 0 for each |n| <= 3 and the m-shift is checked separately.

def _cut_angles(side, n, r):
    if side is CutSide.P:
        return [0.0]
    return [math.pi, 0.0] if (n == 0 and r <= 1) else [math.pi]


def _paths(side, n, steps=400):
    eta = 1e-4
    for r in (0.04, 0.2, 0.7, 0.95, 1.05, 1.6, 4.0, 15.0):
        cuts = sorted(_cut_angles(side, n, r))
        # arcs between consecutive crossings of the declared cut
        bounds = cuts + [cuts[0] + 2 * math.pi]
        for lo, hi in zip(bounds, bounds[1:]):
            ts = np.linspace(lo + eta, hi - eta, steps)
            yield [mpmath.mpc(r * math.cos(t), r * math.sin(t)) for t in ts]
    for t in (-2.9, -2.0, -1.1, -0.3, 0.3, 1.1, 2.0, 2.9):
        rs = np.geomspace(0.03, 30, steps)
        yield [mpmath.mpc(r * math.cos(t), r * math.sin(t)) for r in rs]


def _path_jumps(stack, n, ctx, path):
    L = ctx.L
    jumps = []
    prev_w, prev_f = None, None
    for w in path:
        try:
            f = stack_eval_raw(stack, w, n, 0, ctx)
        except Exception:
            prev_w = None
            continue
        if prev_w is not None:
            n_eff = effective_sheet_raw(stack, w, n, 0, ctx)[0]
            inner = mpmath.log(w) + 2j * n_eff * mpmath.pi
            slope = abs(w - prev_w) / abs(w * L * inner)
            if slope < 0.03 and abs(f - prev_f) > 0.3:
                jumps.append(complex(w))
        prev_w, prev_f = w, f
    return jumps


def _walk(stack, ctx):
    bad = []
    with mpmath.workdps(20):
        for n in range(-3, 4):
            for path in _paths(stack.cut_side, n):
                bad += [(n, w) for w in _path_jumps(stack, n, ctx, path)]
    return bad


@pytest.mark.parametrize("tag, side", STITCHED, ids=lambda v: getattr(v, "value", v))
def test_single_cut(tag, side):
    ctx = ZContext.create(REGION_Z[tag], 20)
    stack = StackId(R(tag), side)
    assert _walk(stack, ctx) == []


def test_single_cut_walk_detects_spiral_cut():
    # plain pLog in 3A keeps its secondary (spiral) cut
    ctx = ZContext.create(REGION_Z["3A"], 20)
    assert _walk(StackId(R.R3A, CutSide.D), ctx)
    ctx = ZContext.create(REGION_Z["1D"], 20)
    assert _walk(StackId(R.R1D, CutSide.D), ctx)


@pytest.mark.parametrize("tag, side", STITCHED, ids=lambda v: getattr(v, "value", v))
def test_stack_m_shift(tag, side):
    ctx = ZContext.create(REGION_Z[tag], 30)
    stack = StackId(R(tag), side)
    rng = random.Random(tag)
    with mpmath.workdps(30):
        shift = 2j * mpmath.pi / ctx.L
        for _ in range(60):
            r, t = 10 ** rng.uniform(-1.3, 1.3), rng.uniform(-math.pi, math.pi)
            w = mpmath.mpc(r * math.cos(t), r * math.sin(t))
            n, m = rng.randint(-3, 3), rng.randint(-3, 2)
            d = stack_eval_raw(stack, w, n, m + 1, ctx) - stack_eval_raw(stack, w, n, m, ctx)
            assert abs(d - shift) < mpmath.mpf(10) ** -26


# -- numpy sheet maps agree with the multiprecision ones -----------------------------

@pytest.mark.parametrize("tag", list(REGION_Z))
def test_dgrid_sheets_match(tag):
    ctx = ZContext.create(REGION_Z[tag], 20)
    rng = np.random.default_rng(5)
    r = 10 ** rng.uniform(-1.5, 1.5, 400)
    th = rng.uniform(-np.pi, np.pi, 400)
    w = r * np.exp(1j * th)
    for side in CutSide:
        stack = StackId(R(tag), side)
        if not stack.valid:
            continue
        for n in (-2, -1, 0, 1, 2):
            nn, mm = dgrid.effective_sheets(stack, w, n, 1, ctx)
            with mpmath.workdps(20):
                for k in range(len(w)):
                    ref = effective_sheet_raw(stack, mpmath.mpc(w[k]), n, 1, ctx)
                    assert (nn[k], mm[k]) == ref, (stack.name, n, w[k])
            v = dgrid.plog_np(w, nn, mm, dgrid.log_z(ctx))
            with mpmath.workdps(20):
                for k in range(0, len(w), 40):
                    ref = complex(stack_eval_raw(stack, mpmath.mpc(w[k]), n, 1, ctx))
                    assert abs(v[k] - ref) < 1e-9 * max(1, abs(ref))

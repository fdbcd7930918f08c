"""Double-precision, numpy-vectorised pLog kernels.

Used for display fields and for coarse attractor searches; never for
reported roots.  Sheet logic mirrors ``stacks`` (tested against it).
"""

from __future__ import annotations

import numpy as np

from .plog import ZContext
from .regions import RegionTag
from .stacks import CutSide, StackId

R = RegionTag
TWO_PI = 2 * np.pi


def log_z(ctx: ZContext) -> complex:
    return complex(float(ctx.a), float(ctx.b))


def _sheet_a(side, r, th, n, m, k):
    """Vectorised A-side sheet maps; n, m are ints, r/th arrays."""
    n_arr = np.full(r.shape, n, dtype=np.int64)
    m_arr = np.full(r.shape, m, dtype=np.int64)

    def rad(nn):
        with np.errstate(over="ignore"):
            return np.exp(k * (th + TWO_PI * nn))

    if side is CutSide.N:
        if n > 0:
            return n_arr, m_arr
        if n == 0:
            drop = (th < 0) & ~(r > rad(0))
        else:
            drop = ~(r >= rad(n))
        return n_arr, m_arr - drop
    # P
    if n >= 0:
        return n_arr + (th < 0), m_arr
    lower = th < 0
    nn = np.where(lower, n + 1, n)
    drop = ~(r >= rad(nn))
    return nn, m_arr - drop


def effective_sheets(stack: StackId, w: np.ndarray, n: int, m: int, ctx: ZContext):
    region, side = stack.region, stack.cut_side
    shape = np.shape(w)
    if side is CutSide.D or region in (R.R1A, R.R1B, R.R1C):
        return np.full(shape, n, dtype=np.int64), np.full(shape, m, dtype=np.int64)
    r, th = np.abs(w), np.angle(w)
    if region in (R.R1D, R.R1E, R.R1F):
        nn = np.full(shape, n, dtype=np.int64)
        mm = np.full(shape, m, dtype=np.int64)
        if n == 0:
            mm = mm - (th < 0)
        elif n < 0:
            mm = mm - 1
        return nn, mm
    a, b = float(ctx.a), float(ctx.b)
    if not region.is_lower:
        return _sheet_a(side, r, th, n, m, a / b)
    n2, m2 = _sheet_a(side, r, -th, -n, -m, a / -b)
    return -n2, -m2


def plog_np(w, n, m, L: complex):
    with np.errstate(all="ignore"):
        inner = (np.log(w) + 1j * TWO_PI * n) / L
        return (np.log(inner) + 1j * TWO_PI * m) / L


def plog_deriv_np(w, n, L: complex):
    with np.errstate(all="ignore"):
        return 1.0 / (w * L * (np.log(w) + 1j * TWO_PI * n))


def newton_iterate(stack: StackId, w0: np.ndarray, n: int, m: int, ctx: ZContext,
                   relaxation: int = 1, iters: int = 60, tol: float = 1e-12):
    """Iterate the relaxed Newton map on an array of seeds.

    Returns (final iterates, converged mask).  Points that blow up or turn
    into NaN are marked not converged.
    """
    L = log_z(ctx)
    w = np.array(w0, dtype=complex)
    done = np.zeros(w.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            nn, mm = effective_sheets(stack, w, n, m, ctx)
            f = plog_np(w, nn, mm, L)
            d = plog_deriv_np(w, nn, L)
            step = relaxation * (w - f) / (1 - d)
            w_new = np.where(done, w, w - step)
            bad = ~np.isfinite(w_new) | (np.abs(w_new) > 1e50)
            w_new = np.where(bad, np.nan, w_new)
            nn, mm = effective_sheets(stack, np.nan_to_num(w_new), n, m, ctx)
            res = np.abs(w_new - plog_np(w_new, nn, mm, L))
            done = done | (res < tol * np.maximum(1.0, np.abs(w_new)))
            w = w_new
            if done.all():
                break
    return w, done & np.isfinite(w)


def cluster(values: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Greedy clustering of complex values; returns (centre, count) pairs."""
    out: list[list] = []
    for v in values:
        for c in out:
            if abs(c[0] - v) < tol:
                c[1] += 1
                break
        else:
            out.append([v, 1])
    return [(c[0], c[1]) for c in out]


def grid(center: complex, width: float, height: float, nx: int, ny: int) -> np.ndarray:
    """Cell centres of an nx-by-ny grid, row 0 at the top."""
    xs = center.real - width / 2 + (np.arange(nx) + 0.5) * width / nx
    ys = center.imag + height / 2 - (np.arange(ny) + 0.5) * height / ny
    return xs[None, :] + 1j * ys[:, None]

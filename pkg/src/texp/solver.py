"""Relaxed Newton iteration on w = pLog(w), sweeps, verification and basins.

The Newton map for a fixed sheet is

    w <- w - k (w - S(w)) / (1 - S'(w)),

with S the chosen stack and k the relaxation (root multiplicity).  The
derivative uses the leaf index the stack actually applied at w.
Convergence means the log-form residual |w - S(w)| drops below
10^-targetAccuracy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp

from . import dgrid
from .errors import ConfigurationError, ConvergenceError, DomainError, MultiplicityError
from .mpcx import PrecComplex, format_mpf, reprecision
from .normal_form import SubSeed, p_order_key, seed as branch_seed, sub_seeds
from .plog import (OVERFLOW, Marker, SheetIndex, ZContext, inner_log_raw,
                   t2_exp_residual_raw)
from .regions import RegionTag
from .stacks import StackId, check_stack, effective_sheet_raw, select_stack, stack_eval_raw
from .zspec import ZSpec

log = logging.getLogger(__name__)

DIVERGENCE_RADIUS = mpmath.mpf(10) ** 50
CYCLE_WINDOW = 8
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class IterationConfig:
    """Solver settings.

    ``relaxation=None`` means the region rule (2 at 1B, 3 at 1E, otherwise 1);
    an explicit value overrides it.
    """

    working_prec: int = 50
    target_accuracy: int | None = None
    max_iters: int = 50
    relaxation: int | None = None

    def __post_init__(self):
        if self.target_accuracy is None:
            object.__setattr__(self, "target_accuracy", self.working_prec - 10)
        if self.working_prec <= self.target_accuracy:
            raise ConfigurationError("working precision must exceed the target accuracy")
        if self.target_accuracy < 1:
            raise ConfigurationError("target accuracy must be positive")
        if self.max_iters < 1:
            raise ConfigurationError("maxIters must be at least 1")
        if self.relaxation is not None and self.relaxation < 1:
            raise ConfigurationError("relaxation must be a positive integer")

    @property
    def tolerance(self) -> mpmath.mpf:
        with mp.workdps(self.working_prec):
            return mpmath.mpf(10) ** (-self.target_accuracy)


@dataclass(frozen=True)
class RootId:
    n: int
    m: int
    p: int | None = None

    @property
    def sheet(self) -> SheetIndex:
        return SheetIndex(self.n, self.m)

    def __str__(self):
        return f"{{{self.n},{self.m}}}" if self.p is None else f"{{{self.n},{self.m},{self.p}}}"


@dataclass(frozen=True)
class RootRecord:
    z: ZSpec
    id: RootId
    value: PrecComplex
    residual_log: mpmath.mpf
    residual_exp: mpmath.mpf | Marker
    iterations: int
    stack: StackId
    region: RegionTag
    converged: bool
    target_accuracy: int
    relaxation: int = 1
    seed: PrecComplex | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def prec(self) -> int:
        return self.value.prec

    def residual_log_str(self) -> str:
        return format_mpf(self.residual_log, 6)

    def residual_exp_str(self) -> str:
        if isinstance(self.residual_exp, Marker):
            return str(self.residual_exp)
        return format_mpf(self.residual_exp, 6)

    def to_dict(self) -> dict:
        re, im = self.value.to_strings()
        d = {
            "schemaVersion": SCHEMA_VERSION,
            "z": self.z.to_dict(),
            "id": {"n": self.id.n, "m": self.id.m, "p": self.id.p},
            "value": {"re": re, "im": im},
            "prec": self.prec,
            "targetAccuracy": self.target_accuracy,
            "residualLog": self.residual_log_str(),
            "residualExp": self.residual_exp_str(),
            "iterations": self.iterations,
            "stack": self.stack.name,
            "region": self.region.value,
            "relaxation": self.relaxation,
            "converged": self.converged,
        }
        if self.seed is not None:
            sr, si = self.seed.to_strings()
            d["seed"] = {"re": sr, "im": si}
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RootRecord":
        z = ZSpec.from_dict(d["z"])
        region = RegionTag(d["region"])
        prec = int(d["prec"])
        value = PrecComplex.from_strings(d["value"]["re"], d["value"]["im"], prec)
        seed = None
        if "seed" in d:
            seed = PrecComplex.from_strings(d["seed"]["re"], d["seed"]["im"], prec)
        rexp = d.get("residualExp", "overflow")
        with mp.workdps(prec):
            res_exp = OVERFLOW if rexp == str(OVERFLOW) else mpmath.mpf(rexp)
            res_log = mpmath.mpf(d["residualLog"])
        i = d["id"]
        return cls(z, RootId(int(i["n"]), int(i["m"]), i.get("p")), value, res_log, res_exp,
                   int(d["iterations"]), StackId.parse(d["stack"], region), region,
                   bool(d.get("converged", True)), int(d["targetAccuracy"]),
                   int(d.get("relaxation", 1)), seed, tuple(d.get("notes", ())))


def region_relaxation(region: RegionTag) -> int:
    return {RegionTag.R1B: 2, RegionTag.R1E: 3}.get(region, 1)


# -- Newton kernel --------------------------------------------------------------

def _eval_raw(stack: StackId, w, n: int, m: int, ctx: ZContext):
    """(S(w), S'(w)) at w with the stack-adjusted sheet."""
    n2, m2 = effective_sheet_raw(stack, w, n, m, ctx)
    L = ctx.L
    inner = inner_log_raw(w, n2)
    q = inner / L
    if not q:
        raise DomainError("inner logarithm singular")
    v = mpmath.log(q)
    f = mpmath.mpc(v.real, v.imag + 2 * m2 * mpmath.pi) / L
    d = 1 / (w * L * inner)
    return f, d


def newton_step(w: PrecComplex, idx: SheetIndex, ctx: ZContext, stack: StackId,
                relaxation: int = 1) -> PrecComplex:
    """One relaxed Newton step at the precision of ``w``."""
    check_stack(stack, ctx)
    c = ctx.at_prec(w.prec)
    with mp.workdps(w.prec):
        f, d = _eval_raw(stack, w.mpc, idx.n, idx.m, c)
        den = 1 - d
        if not den:
            raise MultiplicityError("Newton denominator vanished (multiple root)")
        v = w.mpc - relaxation * (w.mpc - f) / den
        return PrecComplex(+v.real, +v.imag, w.prec)


@dataclass
class _Iteration:
    value: mpmath.mpc
    residual: mpmath.mpf
    iterations: int
    converged: bool
    reason: str = ""
    notes: list = field(default_factory=list)


def _iterate(stack: StackId, w0: mpmath.mpc, n: int, m: int, ctx: ZContext,
             cfg: IterationConfig, relaxation: int) -> _Iteration:
    """Run the Newton loop at ctx.prec (caller holds workdps)."""
    tol = cfg.tolerance
    w = w0
    history: list = []
    notes: list = []
    residual = mpmath.inf
    for it in range(cfg.max_iters + 1):
        try:
            f, d = _eval_raw(stack, w, n, m, ctx)
        except (DomainError, ZeroDivisionError, ValueError) as exc:
            return _Iteration(w, residual, it, False, f"domain: {exc}", notes)
        residual = abs(w - f)
        if residual < tol:
            return _Iteration(w, residual, it, True, "", notes)
        if it == cfg.max_iters:
            break
        den = 1 - d
        if abs(den) < mpmath.mpf(10) ** (-(ctx.prec // 2)):
            if "multiplicity" not in notes:
                notes.append("multiplicity")
            if not den:
                return _Iteration(w, residual, it, False, "vanishing Newton denominator", notes)
        w_new = w - relaxation * (w - f) / den
        if not mpmath.isfinite(w_new.real) or not mpmath.isfinite(w_new.imag) \
                or abs(w_new) > DIVERGENCE_RADIUS:
            return _Iteration(w_new, residual, it + 1, False, "diverged", notes)
        if not w_new:
            return _Iteration(w_new, residual, it + 1, False, "hit w = 0", notes)
        scale = max(abs(w_new), 1) * mpmath.mpf(10) ** (-(ctx.prec - 3))
        if any(abs(w_new - h) <= scale for h in history):
            return _Iteration(w_new, residual, it + 1, False, "cycle", notes)
        history.append(w)
        if len(history) > CYCLE_WINDOW:
            history.pop(0)
        w = w_new
    return _Iteration(w, residual, cfg.max_iters, False, "maxIters reached", notes)


def _exp_residual(w: mpmath.mpc, ctx: ZContext):
    r = t2_exp_residual_raw(w, ctx.L)
    return r if isinstance(r, Marker) else abs(r)


def _record(z_ctx: ZContext, rid: RootId, it: _Iteration, stack: StackId, cfg: IterationConfig,
            relaxation: int, seed_value: PrecComplex) -> RootRecord:
    prec = cfg.working_prec
    with mp.workdps(prec):
        value = PrecComplex(+it.value.real, +it.value.imag, prec)
        if mpmath.isfinite(it.value.real) and mpmath.isfinite(it.value.imag):
            rexp = _exp_residual(value.mpc, z_ctx)
        else:
            rexp = OVERFLOW
        notes = tuple(it.notes) + ((it.reason,) if it.reason else ())
        return RootRecord(z_ctx.z, rid, value, +it.residual, rexp, it.iterations, stack,
                          z_ctx.region, it.converged, cfg.target_accuracy, relaxation,
                          seed_value, notes)


def solve_from(rid: RootId, ctx: ZContext, cfg: IterationConfig, start: PrecComplex,
               stack: StackId, relaxation: int | None = None) -> RootRecord:
    """Iterate sheet ``rid`` from ``start`` with ``stack``; never raises on divergence."""
    check_stack(stack, ctx)
    c = ctx.at_prec(cfg.working_prec)
    relax = relaxation or cfg.relaxation or region_relaxation(ctx.region)
    start = reprecision(start, cfg.working_prec)
    with mp.workdps(cfg.working_prec):
        it = _iterate(stack, start.mpc, rid.n, rid.m, c, cfg, relax)
        return _record(c, rid, it, stack, cfg, relax, start)


def _pick_sub_seed(rid: RootId, ctx: ZContext, cfg: IterationConfig) -> SubSeed:
    if (rid.n, rid.m) != (0, 0):
        raise ConfigurationError("p applies only to sheet {0,0}")
    subs = sub_seeds(ctx.region, ctx.at_prec(cfg.working_prec), cfg.working_prec)
    for s in subs:
        if s.p == rid.p:
            return s
    raise ConfigurationError(f"sheet {{0,0}} of region {ctx.region} has {len(subs)} seeded roots; "
                             f"p = {rid.p} unavailable")


def solve_root(rid: RootId, ctx: ZContext, cfg: IterationConfig | None = None,
               start: PrecComplex | None = None) -> RootRecord:
    """Compute root ``rid``; raises ConvergenceError (with the record) on failure."""
    cfg = cfg or IterationConfig(working_prec=ctx.prec)
    if rid.p is not None:
        sub = _pick_sub_seed(rid, ctx, cfg)
        relax = cfg.relaxation or sub.relaxation
        rec = solve_from(rid, ctx, cfg, start or sub.seed, sub.stack, relax)
    else:
        stack = select_stack(ctx.region, rid.sheet)
        if start is None:
            start = branch_seed(rid.sheet, ctx, cfg.working_prec)
        rec = solve_from(rid, ctx, cfg, start, stack)
    if not rec.converged:
        raise ConvergenceError(f"root {rid} did not converge ({', '.join(rec.notes)})", rec)
    return rec


def solve_sweep(m: int, n_from: int, n_to: int, ctx: ZContext,
                cfg: IterationConfig | None = None) -> list[RootRecord]:
    """Roots {n, m} for n from n_from to n_to inclusive (either direction).

    The first root starts at the branch seed, later ones at the previous
    root.  Sheet {0,0} of a multi-root region contributes every p root.
    Failed roots are recorded (converged = False) and the sweep goes on.
    """
    cfg = cfg or IterationConfig(working_prec=ctx.prec)
    step = 1 if n_to >= n_from else -1
    out: list[RootRecord] = []
    prev: PrecComplex | None = None
    for n in range(n_from, n_to + step, step):
        rid = RootId(n, m)
        if (n, m) == (0, 0) and _is_multi(ctx):
            subs = sub_seeds(ctx.region, ctx.at_prec(cfg.working_prec), cfg.working_prec)
            for s in subs:
                rec = solve_from(RootId(0, 0, s.p), ctx, cfg, s.seed, s.stack,
                                 cfg.relaxation or s.relaxation)
                out.append(rec)
            continue
        stack = select_stack(ctx.region, rid.sheet)
        start = prev if prev is not None else branch_seed(rid.sheet, ctx, cfg.working_prec)
        rec = solve_from(rid, ctx, cfg, start, stack)
        if rec.converged:
            prev = rec.value
        else:
            log.warning("root %s did not converge: %s", rid, ", ".join(rec.notes))
        out.append(rec)
    return out


def _is_multi(ctx: ZContext) -> bool:
    try:
        return len(sub_seeds(ctx.region, ctx.at_prec(20), 20)) > 1
    except (ConfigurationError, DomainError):
        return False


def verify_root(rec: RootRecord, ctx: ZContext | None = None):
    """Recompute (residualLog, residualExp-or-OVERFLOW) from scratch."""
    ctx = (ctx or ZContext.create(rec.z, rec.prec)).at_prec(rec.prec)
    check_stack(rec.stack, ctx)
    with mp.workdps(rec.prec):
        w = rec.value.mpc
        f = stack_eval_raw(rec.stack, w, rec.id.n, rec.id.m, ctx)
        return +abs(w - f), _exp_residual(w, ctx)


# -- basins -----------------------------------------------------------------------

@dataclass
class BasinRaster:
    labels: np.ndarray              # int, -1 = divergence; row 0 at the top
    attractors: list[complex]       # label k -> attractor value
    counts: list[int]
    center: complex
    width: float
    height: float
    divergent: int

    @property
    def shape(self):
        return self.labels.shape


MAX_GRID = 1024


def basin_scan(center: complex, size, grid: tuple[int, int], rid: RootId, ctx: ZContext,
               cfg: IterationConfig | None = None, stack: StackId | None = None,
               cluster_tol: float = 1e-6, precision: str = "mp") -> BasinRaster:
    """Label each cell centre of the window by the attractor it converges to.

    ``size`` is a width or a (width, height) pair.  ``precision`` is ``"mp"``
    (full iterator at cfg precision) or ``"double"`` (numpy, for previews).
    """
    cfg = cfg or IterationConfig(working_prec=ctx.prec)
    nx, ny = grid
    if nx < 1 or ny < 1 or nx > MAX_GRID or ny > MAX_GRID:
        raise ConfigurationError(f"grid must be within 1..{MAX_GRID} per side")
    width, height = (size, size) if np.isscalar(size) else size
    if width <= 0 or height <= 0:
        raise ConfigurationError("window must be nondegenerate")
    stack = stack or select_stack(ctx.region, rid.sheet)
    check_stack(stack, ctx)
    relax = cfg.relaxation or region_relaxation(ctx.region)
    cells = dgrid.grid(complex(center), width, height, nx, ny)
    final = np.full(cells.shape, np.nan, dtype=complex)
    if precision == "double":
        w, ok = dgrid.newton_iterate(stack, cells, rid.n, rid.m, ctx, relax, cfg.max_iters)
        final[ok] = w[ok]
    elif precision == "mp":
        c = ctx.at_prec(cfg.working_prec)
        with mp.workdps(cfg.working_prec):
            for (i, j), v in np.ndenumerate(cells):
                if v == 0:
                    continue
                it = _iterate(stack, mpmath.mpc(v.real, v.imag), rid.n, rid.m, c, cfg, relax)
                if it.converged:
                    final[i, j] = complex(it.value)
    else:
        raise ValueError(f"unknown precision mode {precision!r}")
    good = ~np.isnan(final)
    clusters = dgrid.cluster(final[good], cluster_tol)
    clusters.sort(key=lambda t: p_order_key(t[0], 1e-7))
    centres = [cv for cv, _ in clusters]
    labels = np.full(cells.shape, -1, dtype=np.int64)
    counts = [0] * len(centres)
    for (i, j), v in np.ndenumerate(final):
        if np.isnan(v):
            continue
        k = min(range(len(centres)), key=lambda q: abs(centres[q] - v))
        labels[i, j] = k
        counts[k] += 1
    return BasinRaster(labels, centres, counts, complex(center), float(width), float(height),
                       int((labels < 0).sum()))

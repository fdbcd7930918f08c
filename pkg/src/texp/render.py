"""Contour diagrams (SVG) and basin rasters (PPM).

Everything here runs in double precision; it is for display only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import mpmath
import numpy as np

from . import dgrid
from .errors import ConfigurationError, DomainError, SeedError
from .normal_form import branch_frame, branch_f, envelope_psi, leaf_f, seed, to_base
from .plog import OVERFLOW, SheetIndex, ZContext
from .solver import BasinRaster, RootRecord

LAYERS = frozenset({"realContours", "imagContours", "branchTrace", "leafTrace", "seeds",
                    "roots", "branchDelimiters", "basinRaster"})

DEFAULT_PALETTE = {
    "real": "#d62728",
    "imag": "#1f4fd6",
    "branchF": "#8b4513",
    "leafF": "#000000",
    "seeds": "#2ca02c",
    "delimiterLow": "#800080",
    "delimiterHigh": "#00bcd4",
    "rootPositive": "#000000",
    "rootNegative": "#e6c200",
    "axes": "#777777",
}

# basin colours by label order; divergence is white
BASIN_COLORS = [
    (214, 39, 40), (31, 79, 214), (44, 160, 44), (148, 103, 189), (255, 127, 14),
    (23, 190, 207), (140, 86, 75), (227, 119, 194), (188, 189, 34), (127, 127, 127),
]

MAX_RESOLUTION = 2000
EXP_LIMIT = 700.0


@dataclass(frozen=True)
class PlotSpec:
    center: complex = 0j
    width: float = 20.0
    height: float = 20.0
    resolution: tuple[int, int] = (400, 400)
    layers: frozenset = frozenset({"realContours", "imagContours"})
    palette: dict = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    pixel_width: int = 800
    cycle: int = 2

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ConfigurationError("plot window must be nondegenerate")
        nx, ny = self.resolution
        if not (2 <= nx <= MAX_RESOLUTION and 2 <= ny <= MAX_RESOLUTION):
            raise ConfigurationError(f"resolution must be within 2..{MAX_RESOLUTION} per side")
        unknown = set(self.layers) - LAYERS
        if unknown:
            raise ConfigurationError(f"unknown layers: {', '.join(sorted(unknown))}")
        if self.cycle not in (1, 2):
            raise ConfigurationError("cycle must be 1 or 2")

    @property
    def x_range(self) -> tuple[float, float]:
        return self.center.real - self.width / 2, self.center.real + self.width / 2

    @property
    def y_range(self) -> tuple[float, float]:
        return self.center.imag - self.height / 2, self.center.imag + self.height / 2


# -- fields -----------------------------------------------------------------------

def contour_fields(w: complex, ctx: ZContext, cycle: int = 2):
    """(Re, Im) of z^(z^w) (cycle 2) or z^w (cycle 1), or OVERFLOW."""
    L = dgrid.log_z(ctx)
    e1 = L * complex(w)
    if e1.real > EXP_LIMIT:
        return OVERFLOW
    s = np.exp(e1)
    if cycle == 1:
        return float(s.real), float(s.imag)
    e2 = L * s
    if e2.real > EXP_LIMIT:
        return OVERFLOW
    v = np.exp(e2)
    return float(v.real), float(v.imag)


def field_grid(ws: np.ndarray, ctx: ZContext, cycle: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised contour_fields; overflowing points become NaN."""
    L = dgrid.log_z(ctx)
    with np.errstate(all="ignore"):
        e = L * ws
        if cycle == 2:
            e = np.where(e.real > EXP_LIMIT, np.nan, e)
            e = L * np.exp(e)
        e = np.where(e.real > EXP_LIMIT, np.nan, e)
        v = np.exp(e)
    return v.real, v.imag


def normal_fields(p: tuple[float, float], ctx: ZContext, cycle: int = 2):
    """contour_fields at the base point of normal-frame coordinates ``p``."""
    frame = branch_frame(ctx.at_prec(20))
    x, y = to_base((mpmath.mpf(p[0]), mpmath.mpf(p[1])), frame)
    return contour_fields(complex(float(x), float(y)), ctx, cycle)


# -- marching squares ---------------------------------------------------------------

def marching_squares(xs: np.ndarray, ys: np.ndarray, f: np.ndarray) -> list[tuple]:
    """Zero-level segments of f sampled at (xs[j], ys[i]).

    Returns ((x0, y0), (x1, y1)) pairs; cells touching NaN are skipped and
    saddles are resolved by the cell-centre average.
    """
    segs = []
    neg = f < 0
    corners = (neg[:-1, :-1], neg[:-1, 1:], neg[1:, 1:], neg[1:, :-1])
    mixed = ~((corners[0] == corners[1]) & (corners[1] == corners[2]) & (corners[2] == corners[3]))
    nan = np.isnan(f)
    mixed &= ~(nan[:-1, :-1] | nan[:-1, 1:] | nan[1:, 1:] | nan[1:, :-1])
    for i, j in zip(*np.nonzero(mixed)):
        v = (f[i, j], f[i, j + 1], f[i + 1, j + 1], f[i + 1, j])
        p = ((xs[j], ys[i]), (xs[j + 1], ys[i]), (xs[j + 1], ys[i + 1]), (xs[j], ys[i + 1]))
        cuts = []
        for k in range(4):
            a, b = v[k], v[(k + 1) % 4]
            if (a < 0) != (b < 0):
                t = a / (a - b)
                pa, pb = p[k], p[(k + 1) % 4]
                cuts.append((k, (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))))
        if len(cuts) == 2:
            segs.append((cuts[0][1], cuts[1][1]))
        elif len(cuts) == 4:
            centre_neg = (sum(v) / 4) < 0
            # pair edges so that the centre stays on its own side
            if centre_neg == (v[0] < 0):
                segs.append((cuts[0][1], cuts[1][1]))
                segs.append((cuts[2][1], cuts[3][1]))
            else:
                segs.append((cuts[3][1], cuts[0][1]))
                segs.append((cuts[1][1], cuts[2][1]))
    return segs


def _refine(xs: np.ndarray, ys: np.ndarray, f: np.ndarray, field, sub: int = 4) -> list[tuple]:
    """Re-march same-sign cells whose corner values vary too much to trust.

    Near bulb heads the fields oscillate faster than the grid, so a thin
    zero curve can slip between four same-sign corners.
    """
    c = np.stack([f[:-1, :-1], f[:-1, 1:], f[1:, 1:], f[1:, :-1]])
    with np.errstate(invalid="ignore"):
        same = (np.sign(c) == np.sign(c[0])).all(axis=0)
        wild = (c.max(axis=0) - c.min(axis=0)) > 2 * np.abs(c).min(axis=0)
    segs = []
    for i, j in zip(*np.nonzero(same & wild & ~np.isnan(c).any(axis=0))):
        sx = np.linspace(xs[j], xs[j + 1], sub + 1)
        sy = np.linspace(ys[i], ys[i + 1], sub + 1)
        segs.extend(marching_squares(sx, sy, field(sx[None, :] + 1j * sy[:, None])))
    return segs


def contour_segments(spec: PlotSpec, ctx: ZContext):
    """Red (real) and blue (imaginary) zero curves of the fixed-point fields."""
    nx, ny = spec.resolution
    x0, x1 = spec.x_range
    y0, y1 = spec.y_range
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    W = xs[None, :] + 1j * ys[:, None]
    fr, fi = field_grid(W, ctx, spec.cycle)

    def real(w):
        return field_grid(w, ctx, spec.cycle)[0] - w.real

    def imag(w):
        return field_grid(w, ctx, spec.cycle)[1] - w.imag

    red = marching_squares(xs, ys, fr - W.real)
    blue = marching_squares(xs, ys, fi - W.imag)
    return red + _refine(xs, ys, fr - W.real, real), blue + _refine(xs, ys, fi - W.imag, imag)


# -- traces -------------------------------------------------------------------------

def _visible_branches(spec: PlotSpec, ctx: ZContext, limit: int = 200) -> list[int]:
    frame = branch_frame(ctx.at_prec(20))
    c, g = float(frame.c), float(frame.gamma)
    # normal-frame ordinates covered by the window (rotation preserves radius)
    r = abs(spec.center) + np.hypot(spec.width, spec.height) / 2
    lo = int(np.floor((-r * c + g) / (2 * np.pi))) - 1
    hi = int(np.ceil((r * c + g) / (2 * np.pi))) + 1
    if hi - lo > limit:
        mid = (lo + hi) // 2
        lo, hi = mid - limit // 2, mid + limit // 2
    return list(range(lo, hi + 1))


def branch_trace(m: int, ctx: ZContext, samples: int = 200) -> list[tuple[float, float]]:
    """Brown envelope of branch m as base-frame points."""
    k = ctx.at_prec(20)
    frame = branch_frame(k)
    psi = envelope_psi(m, frame)
    lo, hi = frame.branch_asymptotes(m)
    pts = []
    for t in np.linspace(0, 1, samples + 2)[1:-1]:
        y = lo + (hi - lo) * mpmath.mpf(float(t))
        try:
            x = branch_f(y, psi, k, 20)
        except DomainError:
            continue
        bx, by = to_base((x, y), frame)
        pts.append((float(bx), float(by)))
    return pts


def leaf_trace(n: int, ctx: ZContext, y_range: tuple[float, float],
               samples: int = 400) -> list[list[tuple[float, float]]]:
    """Black trace phi = 2 n pi, split into pieces where leaf_f is defined."""
    k = ctx.at_prec(20)
    frame = branch_frame(k)
    phi = 2 * n * mpmath.pi
    pieces, cur = [], []
    for y in np.linspace(y_range[0], y_range[1], samples):
        try:
            x = leaf_f(mpmath.mpf(float(y)), phi, k, 20)
        except DomainError:
            if len(cur) > 1:
                pieces.append(cur)
            cur = []
            continue
        bx, by = to_base((x, mpmath.mpf(float(y))), frame)
        cur.append((float(bx), float(by)))
    if len(cur) > 1:
        pieces.append(cur)
    return pieces


def delimiters(m: int, ctx: ZContext, extent: float) -> tuple[list, list]:
    """Purple (low) and cyan (high) edges of branch m, width 3 eps / 2, as base segments."""
    frame = branch_frame(ctx.at_prec(20))
    ym = frame.branch_mid(m)
    half = frame.branch_width / 2
    out = []
    for y in (ym - half, ym + half):
        a = to_base((mpmath.mpf(-extent), y), frame)
        b = to_base((mpmath.mpf(extent), y), frame)
        out.append([(float(a[0]), float(a[1])), (float(b[0]), float(b[1]))])
    return out[0], out[1]


# -- SVG ------------------------------------------------------------------------------

class _Canvas:
    def __init__(self, spec: PlotSpec):
        self.spec = spec
        self.px = spec.pixel_width
        self.py = max(1, int(round(spec.pixel_width * spec.height / spec.width)))
        self.parts: list[str] = []

    def map(self, x: float, y: float) -> tuple[float, float]:
        x0, _ = self.spec.x_range
        _, y1 = self.spec.y_range
        return ((x - x0) / self.spec.width * self.px, (y1 - y) / self.spec.height * self.py)

    def inside(self, x: float, y: float, pad: float = 0.0) -> bool:
        x0, x1 = self.spec.x_range
        y0, y1 = self.spec.y_range
        return x0 - pad <= x <= x1 + pad and y0 - pad <= y <= y1 + pad

    def path(self, segs: Iterable, color: str, width: float = 1.0, cls: str = ""):
        d = []
        for (a, b) in segs:
            ax, ay = self.map(*a)
            bx, by = self.map(*b)
            d.append(f"M{ax:.2f} {ay:.2f}L{bx:.2f} {by:.2f}")
        if d:
            self.parts.append(f'<path class="{cls}" d="{"".join(d)}" stroke="{color}" '
                              f'stroke-width="{width}" fill="none"/>')

    def polyline(self, pts: list, color: str, width: float = 1.5, cls: str = ""):
        pts = [p for p in pts if self.inside(*p, pad=max(self.spec.width, self.spec.height))]
        if len(pts) < 2:
            return
        s = " ".join(f"{x:.2f},{y:.2f}" for x, y in (self.map(*p) for p in pts))
        self.parts.append(f'<polyline class="{cls}" points="{s}" stroke="{color}" '
                          f'stroke-width="{width}" fill="none"/>')

    def dot(self, x: float, y: float, color: str, r: float = 3.0, cls: str = ""):
        if not self.inside(x, y):
            return
        cx, cy = self.map(x, y)
        self.parts.append(f'<circle class="{cls}" cx="{cx:.2f}" cy="{cy:.2f}" r="{r}" fill="{color}"/>')

    def text(self, x: float, y: float, s: str, anchor: str = "start"):
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="11" '
                          f'font-family="monospace" text-anchor="{anchor}">{s}</text>')

    def svg(self) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.px}" height="{self.py}" viewBox="0 0 {self.px} {self.py}">\n'
                f'<rect x="0" y="0" width="{self.px}" height="{self.py}" fill="white"/>\n')
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _axes(cv: _Canvas, palette: dict):
    spec = cv.spec
    x0, x1 = spec.x_range
    y0, y1 = spec.y_range
    if y0 <= 0 <= y1:
        cv.path([((x0, 0.0), (x1, 0.0))], palette["axes"], 0.8, "axis")
    if x0 <= 0 <= x1:
        cv.path([((0.0, y0), (0.0, y1))], palette["axes"], 0.8, "axis")
    cv.parts.append(f'<rect class="frame" x="0" y="0" width="{cv.px}" height="{cv.py}" '
                    f'stroke="{palette["axes"]}" fill="none"/>')
    cv.text(3, cv.py - 4, f"{x0:.4g}")
    cv.text(cv.px - 3, cv.py - 4, f"{x1:.4g}", "end")
    cv.text(3, 12, f"{y1:.4g}i")
    cv.text(3, cv.py - 16, f"{y0:.4g}i")


def render_contour_svg(spec: PlotSpec, ctx: ZContext, roots: Iterable[RootRecord] = (),
                       basin: BasinRaster | None = None) -> str:
    pal = {**DEFAULT_PALETTE, **spec.palette}
    cv = _Canvas(spec)
    layers = spec.layers
    if "basinRaster" in layers and basin is not None:
        ny, nx = basin.labels.shape
        cw, ch = cv.px / nx, cv.py / ny
        for (i, j), lab in np.ndenumerate(basin.labels):
            if lab < 0:
                continue
            r, g, b = BASIN_COLORS[lab % len(BASIN_COLORS)]
            cv.parts.append(f'<rect x="{j * cw:.2f}" y="{i * ch:.2f}" width="{cw:.2f}" '
                            f'height="{ch:.2f}" fill="rgb({r},{g},{b})" fill-opacity="0.35"/>')
    _axes(cv, pal)
    if layers & {"realContours", "imagContours"}:
        red, blue = contour_segments(spec, ctx)
        if "realContours" in layers:
            cv.path(red, pal["real"], 1.0, "real")
        if "imagContours" in layers:
            cv.path(blue, pal["imag"], 1.0, "imag")
    branches = _visible_branches(spec, ctx) if layers & {"branchTrace", "seeds", "branchDelimiters"} else []
    extent = abs(spec.center) + np.hypot(spec.width, spec.height)
    for m in branches:
        if "branchDelimiters" in layers:
            low, high = delimiters(m, ctx, extent)
            cv.polyline(low, pal["delimiterLow"], 0.8, "delimiter")
            cv.polyline(high, pal["delimiterHigh"], 0.8, "delimiter")
        if "branchTrace" in layers:
            cv.polyline(branch_trace(m, ctx), pal["branchF"], 1.5, "branchF")
    if "leafTrace" in layers:
        r = abs(spec.center) + np.hypot(spec.width, spec.height) / 2
        for n in [k for k in range(-12, 13) if k]:
            for piece in leaf_trace(n, ctx, (-r, r)):
                cv.polyline(piece, pal["leafF"], 0.8, "leafF")
    if "seeds" in layers:
        for m in branches:
            try:
                s = complex(seed(SheetIndex(0, m), ctx.at_prec(20), 15))
            except SeedError:
                continue
            cv.dot(s.real, s.imag, pal["seeds"], 3.0, "seed")
    if "roots" in layers:
        for rec in roots:
            v = complex(rec.value)
            color = pal["rootNegative"] if rec.id.n < 0 else pal["rootPositive"]
            cv.dot(v.real, v.imag, color, 3.0, "root")
    return cv.svg()


def render_contour(spec: PlotSpec, ctx: ZContext, roots: Iterable[RootRecord] = (),
                   path: str | Path | None = None, basin: BasinRaster | None = None) -> str:
    """Write the contour SVG to ``path`` (if given) and return it."""
    svg = render_contour_svg(spec, ctx, list(roots), basin)
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg


# -- PPM --------------------------------------------------------------------------------

def basin_image(raster: BasinRaster, scale: int | None = None, ctx: ZContext | None = None,
                overlay: bool = False) -> np.ndarray:
    """RGB array for a basin raster (white = divergence)."""
    labels = raster.labels
    if labels.size == 0:
        raise ConfigurationError("empty basin raster")
    ny, nx = labels.shape
    scale = scale or max(1, 400 // max(nx, ny))
    img = np.full((ny, nx, 3), 255, dtype=np.uint8)
    for k in range(len(raster.attractors)):
        img[labels == k] = BASIN_COLORS[k % len(BASIN_COLORS)]
    img = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
    if overlay and ctx is not None:
        H, W = img.shape[:2]
        spec = PlotSpec(raster.center, raster.width, raster.height, (min(W, MAX_RESOLUTION),
                        min(H, MAX_RESOLUTION)), frozenset())
        xs = np.linspace(*spec.x_range, spec.resolution[0])
        ys = np.linspace(spec.y_range[1], spec.y_range[0], spec.resolution[1])
        Wg = xs[None, :] + 1j * ys[:, None]
        fr, fi = field_grid(Wg, ctx)
        for f, col in ((fr - Wg.real, (120, 0, 0)), (fi - Wg.imag, (0, 0, 120))):
            with np.errstate(invalid="ignore"):
                s = np.sign(f)
                edge = np.zeros(f.shape, dtype=bool)
                edge[:, :-1] |= s[:, :-1] * s[:, 1:] < 0
                edge[:-1, :] |= s[:-1, :] * s[1:, :] < 0
            img[:edge.shape[0], :edge.shape[1]][edge] = col
    return img


def render_basin(raster: BasinRaster, path: str | Path | None = None, scale: int | None = None,
                 ctx: ZContext | None = None, overlay: bool = False) -> bytes:
    """Binary PPM (P6) bytes; written to ``path`` when given."""
    img = basin_image(raster, scale, ctx, overlay)
    h, w = img.shape[:2]
    data = f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()
    if path is not None:
        Path(path).write_bytes(data)
    return data

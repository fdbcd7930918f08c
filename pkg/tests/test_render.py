import cmath
import random
import xml.etree.ElementTree as ET

import mpmath
import numpy as np
import pytest

from texp import (ConfigurationError, IterationConfig, RootId, ZContext, ZSpec, basin_scan,
                  branch_f, branch_frame, solve_sweep)
from texp.normal_form import envelope_psi, to_normal
from texp.plog import OVERFLOW
from texp.render import (BASIN_COLORS, PlotSpec, branch_trace, contour_fields, contour_segments,
                         delimiters, field_grid, leaf_trace, marching_squares, render_basin,
                         render_contour)
from texp.solver import BasinRaster

from conftest import REGION_Z

ALL = frozenset({"realContours", "imagContours", "branchTrace", "leafTrace", "seeds", "roots",
                 "branchDelimiters"})


@pytest.mark.parametrize("tag", list(REGION_Z))
def test_field_identity(tag):
    ctx = ZContext.create(REGION_Z[tag], 20)
    Lz = complex(ctx.z.log_modulus(20)) + 1j * float(ctx.z.arg(20))
    rng = random.Random(tag)
    checked = 0
    while checked < 200:
        w = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        f = contour_fields(w, ctx)
        inner = cmath.exp(Lz * w)
        if f is OVERFLOW or (Lz * inner).real > 600:
            continue
        ref = cmath.exp(Lz * inner)
        assert abs(complex(*f) - ref) < 1e-10 * max(1, abs(ref))
        one = contour_fields(w, ctx, cycle=1)
        assert abs(complex(*one) - inner) < 1e-10 * max(1, abs(inner))
        checked += 1


def test_field_examples(two):
    assert abs(complex(*contour_fields(1j, two)) - 2 ** (2 ** 1j)) < 1e-14
    assert contour_fields(0, two, cycle=1) == (1.0, 0.0)
    assert contour_fields(2000, two) is OVERFLOW
    assert contour_fields(50, two) is OVERFLOW


def test_field_grid_matches_pointwise(two):
    ws = np.array([[0.5 + 1j, -3 + 2j], [5 - 4j, 2000 + 0j]])
    fr, fi = field_grid(ws, two)
    for (i, j), w in np.ndenumerate(ws):
        f = contour_fields(w, two)
        if f is OVERFLOW:
            assert np.isnan(fr[i, j])
        else:
            assert (fr[i, j], fi[i, j]) == f


def test_fields_at_roots(two):
    for rec in solve_sweep(0, 1, 5, two, IterationConfig(40, 30)):
        w = complex(rec.value)
        assert abs(complex(*contour_fields(w, two)) - w) < 1e-12


def test_marching_squares_circle():
    xs = np.linspace(-2, 2, 81)
    ys = np.linspace(-2, 2, 81)
    f = xs[None, :] ** 2 + ys[:, None] ** 2 - 1
    segs = marching_squares(xs, ys, f)
    assert len(segs) > 40
    r = [np.hypot(*p) for s in segs for p in s]
    assert max(abs(v - 1) for v in r) < 0.01


def test_marching_squares_skips_nan():
    xs = ys = np.linspace(0, 1, 3)
    f = np.array([[-1, 1, 1], [-1, np.nan, 1], [-1, 1, 1.0]])
    assert marching_squares(xs, ys, f) == []


def _dist_to_segments(p, segs):
    s = np.asarray(segs, dtype=float)
    a, d = s[:, 0], s[:, 1] - s[:, 0]
    dd = np.where((d * d).sum(1) > 0, (d * d).sum(1), 1.0)
    t = np.clip(((np.asarray(p) - a) * d).sum(1) / dd, 0, 1)
    return np.hypot(*(np.asarray(p) - a - t[:, None] * d).T).min()


@pytest.mark.parametrize("z", [ZSpec.polar(2), ZSpec.polar(5, "1/4"), ZSpec.polar("1/2")])
def test_roots_on_both_curves(z):
    ctx = ZContext.create(z, 30)
    recs = [r for m in (-1, 0, 1) for r in solve_sweep(m, 1, 6, ctx, IterationConfig(30, 20))]
    spec = PlotSpec(0j, 40.0, 40.0, (400, 400))
    red, blue = contour_segments(spec, ctx)
    cell = np.hypot(spec.width / 399, spec.height / 399)
    seen = 0
    for rec in recs:
        w = complex(rec.value)
        cx, cy = spec.center.real, spec.center.imag
        if not (abs(w.real - cx) < 20 and abs(w.imag - cy) < 20):
            continue
        assert _dist_to_segments((w.real, w.imag), red) <= cell
        assert _dist_to_segments((w.real, w.imag), blue) <= cell
        seen += 1
    assert seen >= 10


def test_branch_trace_encloses_bulb_roots(two):
    m = -3
    frame = branch_frame(two)
    psi = envelope_psi(m, frame)
    lo, hi = frame.branch_asymptotes(m)
    trace = branch_trace(m, two)
    assert len(trace) > 100
    for bx, by in trace:
        y = to_normal((mpmath.mpf(bx), mpmath.mpf(by)), frame)[1]
        assert lo <= y <= hi
    for rec in solve_sweep(m, 1, 20, two, IterationConfig(40, 30)):
        with mpmath.workdps(30):
            x, y = to_normal((rec.value.re, rec.value.im), frame)
            assert lo < y < hi
            assert x >= branch_f(y, psi, two)


def test_leaf_trace_and_delimiters(two):
    pieces = leaf_trace(2, two, (-20, 20))
    assert pieces and all(len(p) > 1 for p in pieces)
    low, high = delimiters(0, two, 30)
    frame = branch_frame(two)
    assert abs(high[0][1] - low[0][1] - float(frame.branch_width)) < 1e-9


def test_empty_layers_axes_only(two):
    svg = render_contour(PlotSpec(0j, 20.0, 20.0, (50, 50), frozenset()), two)
    root = ET.fromstring(svg)
    classes = {el.get("class") for el in root.iter() if el.get("class")}
    assert classes <= {"axis", "frame"}
    assert "axis" in classes


def test_full_svg_layers_and_colours(two, tmp_path):
    recs = solve_sweep(0, -3, 3, two, IterationConfig(40, 30))
    spec = PlotSpec(0j, 24.0, 24.0, (120, 120), ALL)
    out = tmp_path / "c.svg"
    svg = render_contour(spec, two, recs, out)
    assert out.read_text(encoding="utf-8") == svg
    root = ET.fromstring(svg)
    by_class = {}
    for el in root.iter():
        if el.get("class"):
            by_class.setdefault(el.get("class"), []).append(el)
    for cls in ("real", "imag", "branchF", "leafF", "seed", "root", "delimiter"):
        assert cls in by_class, cls
    assert by_class["real"][0].get("stroke") == "#d62728"
    assert by_class["imag"][0].get("stroke") == "#1f4fd6"
    fills = {el.get("fill") for el in by_class["root"]}
    assert fills == {"#000000", "#e6c200"}


def test_svg_deterministic(two):
    spec = PlotSpec(1 + 1j, 16.0, 12.0, (90, 70), ALL)
    assert render_contour(spec, two) == render_contour(spec, two)


def test_plot_spec_validation():
    with pytest.raises(ConfigurationError):
        PlotSpec(0j, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        PlotSpec(0j, 1.0, 1.0, (5000, 10))
    with pytest.raises(ConfigurationError):
        PlotSpec(0j, 1.0, 1.0, (10, 10), frozenset({"sparkles"}))


def _ppm_pixels(data: bytes) -> np.ndarray:
    head, rest = data.split(b"\n255\n", 1)
    w, h = map(int, head.split(b"\n")[1].split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(h, w, 3)


def test_single_attractor_raster_colours():
    labels = np.array([[0, 0, -1], [0, -1, 0]])
    raster = BasinRaster(labels, [1 + 0j], [4], 0j, 3.0, 2.0, 2)
    data = render_basin(raster, scale=1)
    assert data.startswith(b"P6\n3 2\n255\n")
    px = _ppm_pixels(data)
    colours = {tuple(c) for c in px.reshape(-1, 3)}
    assert colours == {BASIN_COLORS[0], (255, 255, 255)}


def test_basin_image_two_colour_split(tmp_path):
    ctx = ZContext.create(ZSpec.polar(2), 30)
    raster = basin_scan(0, 20, (16, 16), RootId(0, 0), ctx, IterationConfig(30, 20, 60),
                        precision="double")
    data = render_basin(raster, tmp_path / "b.ppm", scale=2)
    assert (tmp_path / "b.ppm").read_bytes() == data
    px = _ppm_pixels(data)
    top = {tuple(c) for c in px[:16].reshape(-1, 3)} - {(255, 255, 255)}
    bottom = {tuple(c) for c in px[16:].reshape(-1, 3)} - {(255, 255, 255)}
    assert top == {BASIN_COLORS[0]} and bottom == {BASIN_COLORS[1]}
    assert render_basin(raster, scale=2) == data
    assert render_basin(raster, scale=2, ctx=ctx, overlay=True) != data


def test_empty_raster_rejected():
    raster = BasinRaster(np.zeros((0, 0), dtype=np.int64), [], [], 0j, 1.0, 1.0, 0)
    with pytest.raises(ConfigurationError):
        render_basin(raster)

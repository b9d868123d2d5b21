"""Grid measurement: labeling, contours, metric area/volume, H^2."""

import math

import numpy as np
import pytest

from isoflow.metric import (
    AmbientMetric,
    enclosed_volume,
    sphere_area,
    sphere_mean_curvature,
)
from isoflow.measure import (
    AxiGrid,
    extract_components,
    g_perimeter,
    g_volume,
    interface_contour,
    interface_H_sq,
    label_regions,
    mean_curvature_field,
    measure_components,
)

EUCLID = AmbientMetric.euclidean()
SCHW = AmbientMetric(mass=1.0)


def ball(R, zc=0.0):
    return lambda rho, z: np.hypot(rho, z - zc) - R


def test_empty_grid_has_no_components():
    g = AxiGrid.sample(0.1, 1.0, -1.0, 1.0, lambda rho, z: rho + z * z + 1.0)
    assert extract_components(g) == []
    assert measure_components(EUCLID, g) == []
    assert interface_contour(g) == []


def test_region_touching_boundary_rejected():
    with pytest.raises(ValueError):
        AxiGrid.sample(0.1, 1.0, -1.0, 1.0, ball(2.0))
    # clears the boundary: fine
    AxiGrid.sample(0.1, 1.0, -1.0, 1.0, ball(0.5))


def test_grid_validation():
    with pytest.raises(ValueError):
        AxiGrid(h=0.0, z_min=0.0, values=np.ones((5, 5)))
    with pytest.raises(ValueError):
        AxiGrid(h=0.1, z_min=0.0, values=np.ones((2, 5)))


def test_ball_is_single_component():
    g = AxiGrid.sample(0.05, 1.6, -1.6, 1.6, ball(1.0))
    comps = extract_components(g)
    assert len(comps) == 1
    assert comps[0].id == 1
    assert comps[0].node_count > 0


def test_two_balls_are_two_components_in_scan_order():
    def two(rho, z):
        return np.minimum(np.hypot(rho, z - 1.3) - 0.7, np.hypot(rho, z + 1.3) - 0.7)

    g = AxiGrid.sample(0.05, 2.4, -2.6, 2.6, two)
    comps = extract_components(g)
    assert len(comps) == 2
    # ids follow the scan order (rho-major) of each component's first node
    firsts = []
    for c in comps:
        ii, jj = np.nonzero(c.node_mask)
        firsts.append(int((ii * g.n_z + jj).min()))
    assert firsts == sorted(firsts)
    # the lower-z ball comes first (both touch the axis row i = 0)
    zc1 = g.z[np.nonzero(comps[0].node_mask)[1]].mean()
    zc2 = g.z[np.nonzero(comps[1].node_mask)[1]].mean()
    assert zc1 < zc2


def test_label_ids_follow_first_scan_node():
    def blobs(rho, z):
        return np.minimum.reduce(
            [
                np.hypot(rho, z - 1.6) - 0.5,
                np.hypot(rho, z + 1.6) - 0.5,
                np.hypot(rho - 1.4, z) - 0.5,
            ]
        )

    g = AxiGrid.sample(0.05, 2.4, -2.4, 2.4, blobs)
    labels, n = label_regions(g)
    assert n == 3
    flat = labels.ravel()
    firsts = [int(np.nonzero(flat == k)[0][0]) for k in (1, 2, 3)]
    assert firsts == sorted(firsts)


def test_ball_contour_open_chain_on_axis():
    h = 0.05
    g = AxiGrid.sample(h, 1.6, -1.6, 1.6, ball(1.0))
    chains = interface_contour(g)
    assert len(chains) == 1
    pts = chains[0]
    # open chain: both endpoints on the axis
    assert pts[0][0] == 0.0 and pts[-1][0] == 0.0
    # every vertex within one cell of the true circle (measured ~2e-4)
    dist = np.abs(np.hypot(pts[:, 0], pts[:, 1]) - 1.0)
    assert dist.max() < h


def test_torus_contour_closed_chain():
    g = AxiGrid.sample(0.02, 2.0, -1.0, 1.0, lambda rho, z: np.hypot(rho - 1.0, z) - 0.4)
    chains = interface_contour(g)
    assert len(chains) == 1
    pts = chains[0]
    assert np.array_equal(pts[0], pts[-1])  # closed loop repeats first point
    P = measure_components(EUCLID, g)[0].perimeter
    exact = 4.0 * math.pi**2 * 1.0 * 0.4  # revolved circle: 2pi*Rc * 2pi*a
    assert abs(P - exact) / exact < 5e-3


def test_perimeter_and_volume_euclidean_ball():
    R = 1.0
    g = AxiGrid.sample(R / 50, 1.6, -1.6, 1.6, ball(R))
    m = measure_components(EUCLID, g)[0]
    A = 4 * math.pi * R**2
    V = 4 / 3 * math.pi * R**3
    # contract bound is 2%; measured 6.6e-5 / 1.2e-4 at h = R/50
    assert abs(m.perimeter - A) / A < 0.02
    assert abs(m.volume - V) / V < 0.02
    assert abs(m.perimeter - A) / A < 2e-3
    assert abs(m.volume - V) / V < 2e-3


def test_perimeter_and_volume_schwarzschild_ball():
    r0 = 4.0
    g = AxiGrid.sample(0.02, 4.6, -4.6, 4.6, ball(r0))
    m = measure_components(SCHW, g)[0]
    A = sphere_area(SCHW, r0)
    V = enclosed_volume(SCHW, r0)
    # measured 2.6e-6 (perimeter) and 3.9e-4 (volume) at h = 0.02
    assert abs(m.perimeter - A) / A < 0.02
    assert abs(m.volume - V) / V < 0.02
    assert abs(m.perimeter - A) / A < 1e-3
    assert abs(m.volume - V) / V < 2e-3


def test_volume_near_horizon_masked_cells():
    # ball close around the horizon: masked cells must not spoil the volume
    for r0 in (0.8, 1.5):
        g = AxiGrid.sample(0.01, r0 + 0.4, -(r0 + 0.4), r0 + 0.4, ball(r0))
        v = measure_components(SCHW, g)[0].volume
        vt = enclosed_volume(SCHW, r0)
        assert abs(v - vt) / vt < 5e-3  # measured -6.9e-4 at r0 = 0.8


def test_h_sq_integral_euclidean_sphere():
    # integral of H^2 over any round sphere is 16 pi
    g = AxiGrid.sample(0.02, 1.6, -1.6, 1.6, ball(1.0))
    m = measure_components(EUCLID, g)[0]
    assert abs(m.h_sq_integral / (16 * math.pi) - 1.0) < 0.05
    assert abs(m.h_sq_integral / (16 * math.pi) - 1.0) < 1e-2  # measured 8e-5


def test_grid_hawking_mass_schwarzschild():
    r0 = 4.0
    g = AxiGrid.sample(0.02, 4.6, -4.6, 4.6, ball(r0))
    m = measure_components(SCHW, g)[0]
    haw = math.sqrt(m.perimeter / (16 * math.pi)) * (
        1.0 - m.h_sq_integral / (16 * math.pi)
    )
    assert abs(haw - SCHW.mass) < 0.05  # measured 1.4e-6


def test_mean_curvature_field_matches_closed_form():
    # signed-distance sphere: level sets are concentric spheres, so the
    # node field must match the closed-form coordinate-sphere curvature
    h = 0.02
    g = AxiGrid.sample(h, 1.6, -1.6, 1.6, ball(1.0))
    F = mean_curvature_field(EUCLID, g)
    r = np.hypot(g.rho[:, None], g.z[None, :])
    band = (np.abs(g.values) < 2 * h) & (r > 0.2)
    rel = np.abs(F[band] - 2.0 / r[band]) / (2.0 / r[band])
    assert rel.max() < 5e-3  # measured 1.6e-4

    gs = AxiGrid.sample(h, 4.6, -4.6, 4.6, ball(4.0))
    Fs = mean_curvature_field(SCHW, gs)
    rs = np.hypot(gs.rho[:, None], gs.z[None, :])
    bs = np.abs(gs.values) < 2 * h
    exact = sphere_mean_curvature(SCHW, rs[bs])
    rel = np.abs(Fs[bs] - exact) / np.abs(exact)
    assert rel.max() < 5e-3  # measured 1.2e-5


def test_interface_h_sq_polyline_route():
    g = AxiGrid.sample(0.02, 1.6, -1.6, 1.6, ball(1.0))
    chains = interface_contour(g)
    total = sum(interface_H_sq(EUCLID, g, c) for c in chains)
    assert abs(total / (16 * math.pi) - 1.0) < 0.02


def test_g_perimeter_polyline_oracle():
    # revolved exact circle polyline vs sphere area, both metrics
    theta = np.linspace(0.0, math.pi, 4001)
    r0 = 4.0
    poly = np.column_stack([r0 * np.sin(theta), r0 * np.cos(theta)])
    assert abs(g_perimeter(EUCLID, poly) - 4 * math.pi * r0**2) / (4 * math.pi * r0**2) < 1e-5
    A = sphere_area(SCHW, r0)
    assert abs(g_perimeter(SCHW, poly) - A) / A < 1e-5


def test_component_sums_equal_isolated_measures_exactly():
    # disjoint union: each component's measures must equal the measures
    # of the same ball alone on the same grid, bit for bit
    def two(rho, z):
        return np.minimum(np.hypot(rho, z - 1.3) - 0.7, np.hypot(rho, z + 1.3) - 0.7)

    g = AxiGrid.sample(0.05, 2.4, -2.6, 2.6, two)
    both = measure_components(EUCLID, g)
    assert len(both) == 2
    g_lo = AxiGrid.sample(0.05, 2.4, -2.6, 2.6, ball(0.7, -1.3))
    g_hi = AxiGrid.sample(0.05, 2.4, -2.6, 2.6, ball(0.7, +1.3))
    lo = measure_components(EUCLID, g_lo)[0]
    hi = measure_components(EUCLID, g_hi)[0]
    assert both[0].perimeter == lo.perimeter
    assert both[0].volume == lo.volume
    assert both[0].h_sq_integral == lo.h_sq_integral
    assert both[1].perimeter == hi.perimeter
    assert both[1].volume == hi.volume
    assert both[1].h_sq_integral == hi.h_sq_integral


def test_z_translation_by_whole_cells_is_exact():
    h = 0.05

    def dumbbell(rho, z):
        d1 = np.hypot(rho, z - 1.5) - 1.0
        d2 = np.hypot(rho, z + 1.5) - 1.0
        neck = np.maximum(rho - 0.35, np.abs(z) - 1.6)
        return np.minimum(np.minimum(d1, d2), neck)

    g1 = AxiGrid.sample(h, 3.0, -3.2, 3.2, dumbbell)
    m1 = measure_components(EUCLID, g1)
    g2 = g1.replace_values(np.roll(g1.values, 13, axis=1))
    m2 = measure_components(EUCLID, g2)
    assert len(m1) == len(m2)
    for a, b in zip(m1, m2):
        assert a.perimeter == b.perimeter
        assert a.volume == b.volume
        assert a.h_sq_integral == b.h_sq_integral


def test_refinement_reduces_error():
    # halving h must cut the error at least by 25%; measured ratio ~0.25
    R = 1.0
    errs = []
    for h in (0.15, 0.075, 0.0375):
        g = AxiGrid.sample(h, 1.8, -1.8, 1.8, ball(R))
        m = measure_components(EUCLID, g)[0]
        errs.append(
            (
                abs(m.perimeter - 4 * math.pi * R**2),
                abs(m.volume - 4 / 3 * math.pi * R**3),
            )
        )
    for k in range(2):
        assert errs[k + 1][0] <= 0.75 * errs[k][0]
        assert errs[k + 1][1] <= 0.75 * errs[k][1]


def _saddle_grid(plateau):
    # one saddle cell: inside corners on the (1,1)-(2,2) diagonal
    v = np.full((4, 4), 2.0)
    v[1, 1] = -1.0
    v[2, 2] = -1.0
    v[2, 1] = plateau
    v[1, 2] = plateau
    return AxiGrid(h=1.0, z_min=0.0, values=v)


def test_saddle_center_mean_rule():
    # center mean < 0: the inside connects through the cell (wide band);
    # center mean >= 0: corners stay separate (two small triangles)
    band = measure_components(EUCLID, _saddle_grid(0.4))
    tri = measure_components(EUCLID, _saddle_grid(1.5))
    assert len(band) == 2 and len(tri) == 2
    band_P = sum(c.perimeter for c in band)
    tri_P = sum(c.perimeter for c in tri)
    band_V = sum(c.volume for c in band)
    tri_V = sum(c.volume for c in tri)
    assert band_P > tri_P
    assert band_V > tri_V


def test_g_volume_matches_component_measures():
    g = _saddle_grid(0.4)
    comps = extract_components(g)
    measures = measure_components(EUCLID, g)
    for c, m in zip(comps, measures):
        assert g_volume(EUCLID, g, c) == m.volume

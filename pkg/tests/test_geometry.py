import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algebroid_obstructions.geometry import (
    AMBIENT,
    EAST,
    NORTH,
    SOUTH,
    STRIP,
    V_MINUS,
    V_PLUS,
    NotClosed,
    OneFormField,
    PolarCover,
    TwoForm,
    area_form,
    bump_form,
    degree_map,
    degree_wrap,
    degree_wrap_jacobian,
    exterior_derivative,
    fibonacci_sphere,
    local_primitive,
    normalize,
    surface_integral,
    unit_square_map,
)

FOUR_PI = 4 * np.pi
CHARTS = [V_PLUS, V_MINUS, STRIP]
unit_points = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: 0.1 < np.linalg.norm(v)
)


def test_area_oracle():
    assert surface_integral(unit_square_map(), area_form(), 400) == pytest.approx(FOUR_PI, rel=1e-4)


def test_surface_integral_second_order():
    errs = [abs(surface_integral(unit_square_map(), area_form(), n) - FOUR_PI) for n in (50, 100, 200)]
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_degree_map_integrates_to_d_times_area(d):
    phi = degree_map(d)
    assert phi.boundary_residual() < 1e-12
    assert surface_integral(phi, area_form(), 400) == pytest.approx(d * FOUR_PI, abs=1e-3)


def test_bump_form_normalized():
    assert surface_integral(unit_square_map(), bump_form(total=1.0), 800) == pytest.approx(1.0, rel=1e-5)


def test_degree_wrap_fixes_east_and_jacobian_integrates():
    for d in (1, 2, 3):
        assert np.allclose(degree_wrap(EAST, d), EAST)
        x = fibonacci_sphere(200000)
        assert np.mean(degree_wrap_jacobian(x, d)) * FOUR_PI == pytest.approx(d * FOUR_PI, rel=1e-3)


@given(unit_points, st.integers(1, 3))
def test_degree_wrap_lands_on_sphere(v, d):
    assert np.linalg.norm(degree_wrap(normalize(np.array(v)), d)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("chart", CHARTS, ids=lambda c: c.name)
def test_chart_roundtrip_and_jacobian(chart):
    rng = np.random.default_rng(0)
    x = normalize(rng.normal(size=(200, 3)))
    x = x[np.abs(x[:, 2]) < 0.8]
    p = chart.from_sphere(x)
    assert np.allclose(chart.to_sphere(p), x, atol=1e-12)
    h = 1e-6
    J = chart.jacobian(p)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (chart.to_sphere(p + e) - chart.to_sphere(p - e)) / (2 * h)
        assert np.allclose(J[..., k], fd, atol=1e-7)
    # positively oriented: outward normal . (d1 x d2) > 0
    assert np.all(np.einsum("ni,ni->n", np.cross(J[..., 0], J[..., 1]), x) > 0)


def test_stereographic_conformal_factor():
    p = np.array([[0.3, -0.4], [1.5, 0.2]])
    J = V_PLUS.jacobian(p)
    area = np.linalg.norm(np.cross(J[..., 0], J[..., 1]), axis=-1)
    r2 = np.sum(p**2, axis=-1)
    assert np.allclose(area, 4 / (1 + r2) ** 2)


def test_equator_winds_once_counterclockwise():
    cover = PolarCover()
    assert cover.winding_number() == 1
    assert np.allclose(cover.equator_on_sphere(0.0), EAST)


@pytest.mark.parametrize("chart", [V_PLUS, V_MINUS], ids=lambda c: c.name)
@pytest.mark.parametrize("omega", [area_form(), bump_form()], ids=["area", "bump"])
def test_local_primitive_is_primitive(chart, omega):
    theta = local_primitive(omega, chart)
    p = np.random.default_rng(1).uniform(-1.5, 1.5, size=(50, 2))
    dtheta = exterior_derivative(theta, p)[..., 0]
    w = omega.in_chart(chart).density(p)
    assert np.allclose(dtheta, -w, atol=1e-6)


def test_local_primitive_linear():
    rng = np.random.default_rng(2)
    p = rng.normal(size=(10, 2))
    a = local_primitive(area_form(), V_PLUS).coeffs(p)
    b = local_primitive(area_form(2.5), V_PLUS).coeffs(p)
    assert np.allclose(b, 2.5 * a, rtol=1e-14)


def test_local_primitive_rejects_singular_density():
    bad = TwoForm(lambda x: 1.0 / (np.asarray(x)[..., 2] - np.asarray(x)[..., 2]))
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(NotClosed):
            local_primitive(bad, V_PLUS)


def test_one_form_chart_transport():
    f = OneFormField.exact(lambda x: np.stack([x[..., 2], 0 * x[..., 0], x[..., 0]], -1), AMBIENT)
    # gradient of x*z in ambient coordinates, moved to a chart and back
    loc = f.to_chart(V_PLUS)
    x = normalize(np.array([[0.2, 0.5, 0.3]]))
    v = np.cross(x, NORTH)
    assert loc.on_sphere(x, v).shape == (1, 1)
    assert np.allclose(loc.on_sphere(x, v), f.on_sphere(x, v), atol=1e-12)


def test_concat_adds_degrees():
    phi = unit_square_map().concat(degree_map(2))
    assert phi.degree == 3
    assert phi.boundary_residual() < 1e-12
    assert surface_integral(phi, area_form(), 400) == pytest.approx(3 * FOUR_PI, abs=2e-3)


def test_tetra_cover_nerve(cover):
    assert cover.nonempty(1) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert cover.nonempty(2) == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    assert cover.nonempty(3) == []
    for s in cover.nonempty(1) + cover.nonempty(2):
        assert cover.is_connected(s)


def test_tetra_vertices_in_triple_overlaps(cover):
    for triple, vertex in [((0, 1, 2), 3), ((0, 1, 3), 2), ((0, 2, 3), 1), ((1, 2, 3), 0)]:
        assert cover.contains_all(triple, cover.vertices[vertex])
    assert np.allclose(cover.vertices[2], EAST)
    assert np.allclose(cover.face_center(3), SOUTH)


def test_tetra_cover_covers_sphere(cover):
    x = fibonacci_sphere(20000)
    inside = np.zeros(len(x), dtype=bool)
    for i in range(4):
        inside |= cover.contains(i, x)
    assert inside.all()


def test_tetra_orientation(cover):
    # F_0 - F_1 + F_2 - F_3 is the outward fundamental class
    V = cover.vertices
    signs = []
    for i in range(4):
        a, b, c = [V[j] for j in range(4) if j != i]
        signs.append(np.sign(np.dot(np.cross(b - a, c - a), cover.face_center(i))))
    assert signs == [1, -1, 1, -1]


def test_wide_cover_has_quadruple_overlap(wide_cover):
    assert wide_cover.nonempty(3) == [(0, 1, 2, 3)]

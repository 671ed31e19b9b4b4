import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from algebroid_obstructions.geometry import PLANE, STRIP, OneFormField, PolarCover
from algebroid_obstructions.lie_core import REALS, SO3_MODEL, SU2_MODEL
from algebroid_obstructions.maurer_cartan import (
    NotFlat,
    PathSample,
    darboux_derivative,
    exp_darboux_form,
    integrate_along_path,
    loop_monodromy,
    mc_residual,
    quasiperiodic_solve,
)
from algebroid_obstructions.obstructions import so3_clutching_spec

GRID = np.random.default_rng(0).uniform(-1, 1, size=(60, 2))


def constant_form(chart, rows):
    rows = np.asarray(rows, dtype=float)
    return OneFormField(lambda p: np.broadcast_to(rows, np.shape(p)[:-1] + rows.shape).copy(), chart, rows.shape[-1])


def random_flat_form(model, seed):
    C = np.random.default_rng(seed).normal(size=(model.dim, 3)) * 0.7

    def X(p):
        return p[..., 0, None] * C[:, 0] + p[..., 1, None] * C[:, 1] + (p[..., 0] * p[..., 1])[..., None] * C[:, 2]

    def dX(p):
        return np.stack([C[:, 0] + p[..., 1, None] * C[:, 2], C[:, 1] + p[..., 0, None] * C[:, 2]], axis=-2)

    return exp_darboux_form(model, X, dX, PLANE), (lambda p: model.exp(X(p)))


# mc_residual -----------------------------------------------------------------


def test_mc_residual_zero_form():
    assert mc_residual(OneFormField.zero(PLANE, 3), GRID, SU2_MODEL) == 0.0


def test_mc_residual_constant_angle_form():
    eta = constant_form(STRIP, [[0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
    assert mc_residual(eta, GRID, SU2_MODEL) < 1e-10


def test_mc_residual_nonflat_witness():
    # eta = x b_1 dy has d eta = b_1 dx ^ dy and [eta, eta] = 0
    eta = OneFormField(
        lambda p: np.stack([np.zeros(p.shape[:-1] + (3,)), p[..., 0, None] * np.array([1.0, 0.0, 0.0])], axis=-2),
        PLANE,
        3,
    )
    assert mc_residual(eta, GRID, SU2_MODEL) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", [SU2_MODEL, SO3_MODEL], ids=lambda m: m.name)
def test_darboux_pullback_residual_is_second_order(model):
    # the structure equation holds for Delta(f); the FD residual is O(step^2)
    def X(p):
        return np.stack([np.sin(p[..., 0]) * p[..., 1], p[..., 0] ** 2, np.cos(p[..., 1])], axis=-1)

    def coeffs(p, h):
        f = lambda q: model.exp(X(q))
        out = np.empty(p.shape[:-1] + (2, 3))
        for i, q in enumerate(p):
            for a in range(2):
                out[i, a] = darboux_derivative(f, q, np.eye(2)[a], model, step=1e-6)
        return out

    pts = GRID[:8]
    eta = OneFormField(lambda p: coeffs(np.atleast_2d(p).reshape(-1, 2), 0).reshape(np.shape(p)[:-1] + (2, 3)), PLANE, 3)
    r1 = mc_residual(eta, pts, model, fd_step=4e-2)
    r2 = mc_residual(eta, pts, model, fd_step=2e-2)
    assert r2 < r1
    assert 3.0 < r1 / r2 < 5.0


# integration -------------------------------------------------------------------


def test_integrate_zero_form_is_identity():
    path = PathSample.straight([0.0, 0.0], [1.0, 2.0], 16, PLANE)
    assert np.allclose(integrate_along_path(OneFormField.zero(PLANE, 3), path, SU2_MODEL), np.eye(2))


@given(arrays(np.float64, 4, elements=st.floats(-2, 2)), arrays(np.float64, 2, elements=st.floats(-1, 1)))
def test_real_integration_is_fundamental_theorem(c, end):
    f = lambda p: c[0] * p[..., 0] + c[1] * p[..., 1] ** 2 + c[2] * np.sin(p[..., 0] * p[..., 1]) + c[3]
    grad = lambda p: np.stack(
        [
            c[0] + c[2] * p[..., 1] * np.cos(p[..., 0] * p[..., 1]),
            2 * c[1] * p[..., 1] + c[2] * p[..., 0] * np.cos(p[..., 0] * p[..., 1]),
        ],
        axis=-1,
    )[..., None]
    eta = OneFormField(grad, PLANE, 1)
    start = np.array([0.1, -0.2])
    path = PathSample.from_function(lambda t: start + np.sin(3 * t)[:, None] * 0.2 + t[:, None] * (end - start), 400, PLANE)
    g = integrate_along_path(eta, path, REALS)
    assert g[0, 0] == pytest.approx(f(path.end()) - f(start), abs=1e-4)


def test_su2_diagonal_exponential_oracle():
    eta = constant_form(PLANE, [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    path = PathSample.straight([0.0, 0.0], [2 * np.pi, 0.0], 100, PLANE)
    assert np.allclose(integrate_along_path(eta, path, SU2_MODEL), -np.eye(2), atol=1e-6)


def test_batched_integration_matches_single():
    eta, _ = random_flat_form(SU2_MODEL, 3)
    ends = np.array([[0.3, 0.5], [-0.4, 0.2]])
    path = PathSample.straight(np.zeros_like(ends), ends, 64, PLANE)
    batch = integrate_along_path(eta, path, SU2_MODEL)
    for k in range(2):
        single = integrate_along_path(eta, PathSample.straight([0.0, 0.0], ends[k], 64, PLANE), SU2_MODEL)
        assert np.allclose(batch[k], single, atol=1e-14)


def test_darboux_roundtrip_first_order_or_better():
    eta, _ = random_flat_form(SU2_MODEL, 4)
    p0, v = np.array([0.4, -0.3]), np.array([0.6, 0.8])
    errs = []
    for n in (8, 16, 32):
        f = lambda p, n=n: integrate_along_path(eta, PathSample.straight([0.0, 0.0], p, n, PLANE), SU2_MODEL)
        errs.append(np.max(np.abs(darboux_derivative(f, p0, v, SU2_MODEL, step=1e-5) - eta(p0, v))))
    h = 1.0 / np.array([8, 16, 32])
    assert np.all(np.array(errs) < 2.0 * h)
    assert errs[2] < errs[0]


# identities for Delta ---------------------------------------------------------------


@pytest.mark.parametrize("model", [SU2_MODEL, SO3_MODEL], ids=lambda m: m.name)
def test_product_formula_on_random_pairs(model):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        A, B = rng.normal(size=(2, 3, 3))
        f1 = lambda p, A=A: model.exp(A[0] * p[0] + A[1] * p[1] + A[2] * p[0] * p[1])
        f2 = lambda p, B=B: model.exp(B[0] * np.sin(p[0]) + B[1] * p[1] ** 2 + B[2])
        prod = lambda p: model.mul(f1(p), f2(p))
        p, v = rng.uniform(-1, 1, size=(2, 2))
        lhs = darboux_derivative(prod, p, v, model)
        rhs = darboux_derivative(f1, p, v, model) + model.Ad(f1(p), darboux_derivative(f2, p, v, model))
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    assert worst < 1e-6


def test_inverse_formula():
    rng = np.random.default_rng(6)
    model = SU2_MODEL
    for _ in range(20):
        A = rng.normal(size=(3, 3))
        f = lambda p: model.exp(A[0] * p[0] + A[1] * p[1] ** 2 + A[2] * p[0] * p[1])
        finv = lambda p: model.inv(f(p))
        p, v = rng.uniform(-1, 1, size=(2, 2))
        lhs = darboux_derivative(finv, p, v, model)
        rhs = -model.Ad(finv(p), darboux_derivative(f, p, v, model))
        assert np.allclose(lhs, rhs, atol=1e-6)


def test_derivative_of_adjoint():
    # (d Ad_f(v)) X = [Delta(f)(v), Ad_f X], i.e. ad_{Delta f} o Ad_f
    rng = np.random.default_rng(7)
    model = SU2_MODEL
    A = rng.normal(size=(3, 3))
    f = lambda p: model.exp(A[0] * p[0] + A[1] * np.cos(p[1]) + A[2] * p[0] * p[1])
    p, v = rng.uniform(-1, 1, size=(2, 2))
    h = 1e-5
    dAd = (model.Ad_matrix(f(p + h * v)) - model.Ad_matrix(f(p - h * v))) / (2 * h)
    D = model.ad_matrix(darboux_derivative(f, p, v, model))
    Ad = model.Ad_matrix(f(p))
    assert np.allclose(dAd, D @ Ad, atol=1e-6)


def test_exp_darboux_form_matches_finite_differences():
    eta, f = random_flat_form(SO3_MODEL, 8)
    p, v = np.array([0.2, 0.7]), np.array([1.0, -0.5])
    assert np.allclose(eta(p, v), darboux_derivative(f, p, v, SO3_MODEL), atol=1e-8)
    assert mc_residual(eta, GRID, SO3_MODEL) < 1e-6


# flatness consequences ---------------------------------------------------------


def test_flat_path_independence_within_Ch():
    eta, f = random_flat_form(SU2_MODEL, 9)
    a, b = np.array([-0.5, -0.4]), np.array([0.6, 0.5])
    diffs = []
    for n in (32, 64, 128):
        g1 = integrate_along_path(eta, PathSample.staircase(a, b, n, PLANE, first_axis=0), SU2_MODEL)
        g2 = integrate_along_path(eta, PathSample.staircase(a, b, n, PLANE, first_axis=1), SU2_MODEL)
        diffs.append(np.max(np.abs(g1 - g2)))
    assert all(d < 1.0 / n for d, n in zip(diffs, (32, 64, 128)))
    exact = f(b) @ np.linalg.inv(f(a))
    g = integrate_along_path(eta, PathSample.staircase(a, b, 256, PLANE), SU2_MODEL)
    assert np.allclose(g, exact, atol=1e-4)


def test_loop_monodromy_homomorphism():
    theta = so3_clutching_spec(1, twist=0.8).theta_strip
    loop1 = PathSample.from_function(PolarCover().equator, 512, STRIP)
    wiggle = lambda t: np.stack([2 * np.pi * t, 0.3 * np.sin(2 * np.pi * t)], axis=-1)
    loop2 = PathSample.from_function(wiggle, 512, STRIP)
    shifted = PathSample(loop2.points + [2 * np.pi, 0.0], loop2.midpoints + [2 * np.pi, 0.0], STRIP)
    m1 = loop_monodromy(theta, loop1, SU2_MODEL)
    m2 = loop_monodromy(theta, loop2, SU2_MODEL)
    both = loop_monodromy(theta, loop1.then(shifted), SU2_MODEL)
    assert np.allclose(both, m2 @ m1, atol=2e-5)
    # homotopic loops in the annulus have the same monodromy
    assert np.allclose(m1, m2, atol=1e-5)
    assert np.allclose(m1, -np.eye(2), atol=1e-5)


def test_loop_monodromy_real_line_integral():
    c = 2.75
    eta = constant_form(STRIP, [[c / (2 * np.pi)], [0.0]])
    loop = PathSample.from_function(PolarCover().equator, 64, STRIP)
    assert loop_monodromy(eta, loop, REALS)[0, 0] == pytest.approx(c, abs=1e-6)


def test_loop_monodromy_zero_form():
    loop = PathSample.from_function(PolarCover().equator, 64, STRIP)
    assert np.allclose(loop_monodromy(OneFormField.zero(STRIP, 3), loop, SU2_MODEL), np.eye(2))


def test_loop_monodromy_rejects_curved_form():
    eta = OneFormField(lambda p: np.stack([np.zeros(p.shape[:-1] + (3,)), p[..., 0, None] * np.array([1.0, 0, 0])], -2), PLANE, 3)
    loop = PathSample.from_function(lambda t: np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], -1), 64, PLANE)
    with pytest.raises(NotFlat):
        loop_monodromy(eta, loop, SU2_MODEL)


def test_loop_must_close():
    path = PathSample.straight([0.0, 0.0], [1.0, 0.0], 8, PLANE)
    with pytest.raises(ValueError):
        loop_monodromy(OneFormField.zero(PLANE, 1), path, REALS)


# quasi-periodic solutions --------------------------------------------------------


def test_quasiperiodic_zero_form():
    sol = quasiperiodic_solve(OneFormField.zero(STRIP, 3), SU2_MODEL, steps_per_turn=64)
    assert np.allclose(sol.values, np.eye(2))
    assert np.allclose(sol.rho_generator, np.eye(2))


def test_quasiperiodic_real_antiderivative():
    c = -1.3
    eta = constant_form(STRIP, [[c / (2 * np.pi)], [0.0]])
    sol = quasiperiodic_solve(eta, REALS, steps_per_turn=128)
    expected = c * sol.angles / (2 * np.pi)
    assert np.allclose(sol.values[..., 0, 0], expected[:, None], atol=1e-12)
    assert sol.rho_generator[0, 0] == pytest.approx(c)
    assert sol.basepoint_value()[0, 0] == 0.0


def test_quasiperiodic_su2_minus_identity():
    eta = constant_form(STRIP, [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    sol = quasiperiodic_solve(eta, SU2_MODEL, steps_per_turn=256)
    assert np.allclose(sol.rho_generator, -np.eye(2), atol=1e-6)
    assert sol.quasi_periodicity_residual() < 1e-10
    assert np.allclose(sol.basepoint_value(), np.eye(2))


def test_quasiperiodic_rejects_curved_form():
    eta = OneFormField(lambda p: np.stack([p[..., 1, None] * np.array([1.0, 0, 0]), np.zeros(p.shape[:-1] + (3,))], -2), STRIP, 3)
    with pytest.raises(NotFlat):
        quasiperiodic_solve(eta, SU2_MODEL, steps_per_turn=64)

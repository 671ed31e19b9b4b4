"""Maurer-Cartan integration of algebra-valued one-forms.

Conventions.  The Darboux derivative of ``f: M -> G`` is the right one,
``Delta(f) = df f^{-1}``.  A form is flat (Maurer-Cartan) when
``d eta + [eta, eta] = 0`` for the right-invariant bracket, which in matrix
terms reads ``d eta(X, Y) = ad(eta(X), eta(Y))`` with ``ad`` the matrix
commutator.  Integration steps multiply new increments on the left,
``f_{k+1} = exp(eta(midpoint) . chord) f_k``, so integrals are unique up to
right translation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .geometry import STRIP, OneFormField, PolarCover
from .lie_core import GroupModel

__all__ = [
    "NotFlat",
    "PathSample",
    "QuasiPeriodicSolution",
    "mc_residual",
    "integrate_along_path",
    "darboux_derivative",
    "exp_darboux_form",
    "loop_monodromy",
    "quasiperiodic_solve",
    "strip_grid",
    "FLAT_TOL",
]

FLAT_TOL = 1e-6


class NotFlat(ValueError):
    """The Maurer-Cartan residual of a form exceeds the flatness tolerance."""


@dataclass
class PathSample:
    """Discrete path in chart coordinates.

    ``points`` has shape ``(n + 1, *batch, k)`` and ``midpoints`` shape
    ``(n, *batch, k)``; batched paths are integrated together.
    """

    points: np.ndarray
    midpoints: np.ndarray
    chart: object = None

    @property
    def steps(self):
        return len(self.midpoints)

    @property
    def h(self):
        return 1.0 / self.steps

    @classmethod
    def from_function(cls, gamma, n, chart=None):
        t = np.linspace(0.0, 1.0, n + 1)
        tm = (np.arange(n) + 0.5) / n
        return cls(np.asarray(gamma(t), dtype=float), np.asarray(gamma(tm), dtype=float), chart)

    @classmethod
    def straight(cls, a, b, n, chart=None):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)

        def gamma(t):
            t = t.reshape((-1,) + (1,) * a.ndim)
            return a + t * (b - a)

        return cls.from_function(gamma, n, chart)

    @classmethod
    def staircase(cls, a, b, n, chart=None, first_axis=0):
        """Axis-parallel path a -> corner -> b, ``n`` steps per leg."""
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        corner = a.copy()
        corner[..., first_axis] = b[..., first_axis]
        return cls.straight(a, corner, n, chart).then(cls.straight(corner, b, n, chart))

    def then(self, other):
        pts = np.concatenate([self.points, other.points[1:]], axis=0)
        mids = np.concatenate([self.midpoints, other.midpoints], axis=0)
        return PathSample(pts, mids, self.chart)

    def reversed(self):
        return PathSample(self.points[::-1].copy(), self.midpoints[::-1].copy(), self.chart)

    def start(self):
        return self.points[0]

    def end(self):
        return self.points[-1]


def _form_in(eta: OneFormField, chart):
    if chart is None or chart is eta.chart:
        return eta
    return eta.to_chart(chart)


def path_increments(eta: OneFormField, path: PathSample):
    """Algebra increments ``eta(midpoint)(chord)`` for every step."""
    eta = _form_in(eta, path.chart)
    chords = np.diff(path.points, axis=0)
    return eta(path.midpoints, chords)


def integrate_along_path(eta, path: PathSample, model: GroupModel, start=None, return_all=False):
    """Integrate ``Delta(f) = eta`` along ``path`` with ``f(start) = start`` (identity by default).

    Uses the midpoint-exponential product ``f_{k+1} = exp(X_k) f_k``.
    """
    X = path_increments(eta, path)
    batch = X.shape[1:-1]
    g = model.identity() if start is None else np.asarray(start)
    g = np.broadcast_to(g, batch + g.shape[-2:]).copy()
    if model.abelian and model.matrix_size == 1 and model.name == "R":
        steps = np.cumsum(X, axis=0)[..., None, :]
        out = np.concatenate([g[None], g[None] + steps], axis=0)
        return out if return_all else out[-1]
    E = model.exp(X)
    if return_all:
        out = np.empty((len(E) + 1,) + g.shape, dtype=np.result_type(E, g))
        out[0] = g
    for k in range(len(E)):
        g = model.mul(E[k], g)
        if return_all:
            out[k + 1] = g
    return out if return_all else g


def darboux_derivative(f, point, direction, model: GroupModel, step=1e-5):
    """Central-difference value of ``(df) f^{-1}`` at ``point`` along ``direction``."""
    p = np.asarray(point, dtype=float)
    v = np.asarray(direction, dtype=float)
    base_inv = model.inv(f(p))
    plus = model.log(model.mul(f(p + step * v), base_inv))
    minus = model.log(model.mul(f(p - step * v), base_inv))
    return (plus - minus) / (2.0 * step)


def exp_darboux_form(model: GroupModel, X, dX, chart):
    """Exact Maurer-Cartan form ``Delta(exp o X)`` on a chart.

    ``X(p)`` returns algebra coordinates ``(..., dim)`` and ``dX(p)`` their
    chart derivatives ``(..., k, dim)``.  The derivative of the exponential is
    read off the block matrix ``expm([[A, dA], [0, A]])``, exact to rounding.
    """

    def coeffs(p):
        p = np.asarray(p, dtype=float)
        A = model.hat(X(p))
        dA = model.hat(dX(p))
        m = A.shape[-1]
        out = np.empty(p.shape[:-1] + (chart.dim, model.dim))
        g_inv = model.inv(expm(A)) if A.ndim == 2 else np.linalg.inv(expm(A))
        for a in range(chart.dim):
            block = np.zeros(A.shape[:-2] + (2 * m, 2 * m), dtype=np.result_type(A, dA, complex))
            block[..., :m, :m] = A
            block[..., m:, m:] = A
            block[..., :m, m:] = dA[..., a, :, :]
            D = expm(block)[..., :m, m:]
            out[..., a, :] = np.real_if_close(model.vee(D @ g_inv))
        return out

    return OneFormField(coeffs, chart, model.dim)


def mc_residual(eta: OneFormField, points, model: GroupModel, fd_step=1e-4, reduce=True):
    """Max norm of ``d eta(d1, d2) - ad(eta_1, eta_2)`` at 2-d chart points.

    The exterior derivative is taken by central differences with spacing
    ``fd_step``; for a smooth flat form the residual is ``O(fd_step^2)``.
    """
    p = np.asarray(points, dtype=float)
    c = eta.coeffs
    e1, e2 = np.array([fd_step, 0.0]), np.array([0.0, fd_step])
    d1_c2 = (c(p + e1)[..., 1, :] - c(p - e1)[..., 1, :]) / (2 * fd_step)
    d2_c1 = (c(p + e2)[..., 0, :] - c(p - e2)[..., 0, :]) / (2 * fd_step)
    c0 = c(p)
    res = d1_c2 - d2_c1 - model.ad(c0[..., 0, :], c0[..., 1, :])
    norms = np.linalg.norm(res, axis=-1)
    if not reduce:
        return norms
    return float(np.max(norms)) if norms.size else 0.0


def _loop_band(loop: PathSample, width=0.05, layers=2):
    mids = loop.midpoints.reshape(-1, loop.midpoints.shape[-1])
    if mids.shape[-1] != 2:
        return mids
    tang = np.gradient(mids, axis=0)
    normal = np.stack([-tang[:, 1], tang[:, 0]], axis=-1)
    normal /= np.maximum(np.linalg.norm(normal, axis=-1, keepdims=True), 1e-300)
    offs = np.linspace(-width, width, 2 * layers + 1)
    return np.concatenate([mids + o * normal for o in offs])


def loop_monodromy(eta, loop: PathSample, model: GroupModel, check_points=None, flat_tol=FLAT_TOL):
    """Holonomy of a flat form around a closed loop (identity at the start)."""
    closure = np.max(np.abs(loop.points[0] - loop.points[-1]))
    if closure > 1e-9 and loop.chart is not STRIP:
        raise ValueError(f"loop is not closed (gap {closure:.3e})")
    eta_l = _form_in(eta, loop.chart)
    if eta_l.chart.dim == 2:
        pts = _loop_band(loop) if check_points is None else check_points
        r = mc_residual(eta_l, pts, model)
        if r > flat_tol:
            raise NotFlat(f"Maurer-Cartan residual {r:.3e} exceeds {flat_tol:.1e}")
    return integrate_along_path(eta_l, loop, model)


# ---------------------------------------------------------------------------
# quasi-periodic solutions on the annulus


def strip_grid(n_angle=64, n_height=9, height=0.5, periods=1):
    th = np.linspace(0.0, 2.0 * np.pi * periods, n_angle * periods, endpoint=False)
    z = np.linspace(-height, height, n_height)
    T, Z = np.meshgrid(th, z, indexing="ij")
    return np.stack([T, Z], axis=-1).reshape(-1, 2)


@dataclass
class QuasiPeriodicSolution:
    """Samples of ``f`` on the strip ``angle x height`` with ``f(E~) = 1``.

    ``values[i, j]`` is ``f(angles[i], heights[j])``; ``angles`` spans
    ``periods`` full turns in steps of ``2 pi / steps_per_turn``.
    """

    angles: np.ndarray
    heights: np.ndarray
    values: np.ndarray
    rho_generator: np.ndarray
    model: GroupModel
    steps_per_turn: int

    def basepoint_value(self):
        j0 = int(np.argmin(np.abs(self.heights)))
        return self.values[0, j0]

    def quasi_periodicity_residual(self):
        """Max distance between ``f(angle + 2 pi, h)`` and ``f(angle, h) rho``."""
        n = self.steps_per_turn
        a = self.values[n:]
        b = self.model.mul(self.values[: len(a)], self.rho_generator)
        return float(np.max(self.model.distance(a, b)))

    def at(self, angle_index, height_index):
        return self.values[angle_index, height_index]


def quasiperiodic_solve(
    eta: OneFormField,
    model: GroupModel,
    steps_per_turn=2048,
    periods=2,
    heights=None,
    height_steps=64,
    flat_tol=FLAT_TOL,
):
    """Integrate a flat form on the universal cover of the polar annulus.

    Staircase paths: from ``E~ = (0, 0)`` along ``height = 0`` to the angle, then
    vertically.  ``rho_generator`` is the value after one counter-clockwise
    turn of the equator.
    """
    eta_s = _form_in(eta, STRIP)
    if heights is None:
        heights = np.linspace(-0.5, 0.5, 9)
    heights = np.asarray(heights, dtype=float)
    hmax = max(float(np.max(np.abs(heights))), 1e-3)
    grid = strip_grid(64, 9, hmax)
    r = mc_residual(eta_s, grid, model)
    if r > flat_tol:
        raise NotFlat(f"Maurer-Cartan residual {r:.3e} exceeds {flat_tol:.1e}")

    cover = PolarCover()
    turns = PathSample.from_function(lambda t: cover.equator(periods * t), steps_per_turn * periods, STRIP)
    horizontal = integrate_along_path(eta_s, turns, model, return_all=True)
    angles = turns.points[:, 0]
    rho = horizontal[steps_per_turn]

    values = np.empty((len(angles), len(heights)) + horizontal.shape[-2:], dtype=horizontal.dtype)
    for j, z in enumerate(heights):
        if z == 0.0:
            values[:, j] = horizontal
            continue
        a = np.stack([angles, np.zeros_like(angles)], axis=-1)
        b = np.stack([angles, np.full_like(angles, z)], axis=-1)
        n = max(1, int(np.ceil(height_steps * abs(z) / hmax)))
        vertical = PathSample.straight(a, b, n, STRIP)
        values[:, j] = integrate_along_path(eta_s, vertical, model, start=horizontal)
    return QuasiPeriodicSolution(angles, heights, values, rho, model, steps_per_turn)

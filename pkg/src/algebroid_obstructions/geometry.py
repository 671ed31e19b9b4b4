"""Parametrized geometry of the unit sphere.

Points are arrays of shape ``(..., 3)``.  Charts map open subsets of the
sphere to planar coordinates; one-forms carry the chart they are expressed in
and may be moved between charts or to ambient coordinates on R^3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

__all__ = [
    "EAST",
    "NORTH",
    "SOUTH",
    "normalize",
    "Chart",
    "PlaneChart",
    "AmbientChart",
    "StereographicChart",
    "StripChart",
    "AMBIENT",
    "PLANE",
    "STRIP",
    "V_PLUS",
    "V_MINUS",
    "OneFormField",
    "TwoForm",
    "ChartTwoForm",
    "SquareMap",
    "PolarCover",
    "TetraCover",
    "NotClosed",
    "area_form",
    "bump_form",
    "degree_wrap",
    "degree_wrap_jacobian",
    "unit_square_map",
    "degree_map",
    "surface_integral",
    "local_primitive",
    "geodesic",
    "fibonacci_sphere",
    "gauss_legendre",
]

EAST = np.array([0.0, 1.0, 0.0])
NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = np.array([0.0, 0.0, -1.0])


class NotClosed(ValueError):
    """A two-form failed the closedness check on a chart."""


def normalize(x):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def fibonacci_sphere(n):
    """Quasi-uniform deterministic sample of ``n`` points on the sphere."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (1.0 + 5**0.5) * i
    r = np.sqrt(1.0 - z**2)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def gauss_legendre(n, a=0.0, b=1.0):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def geodesic(a, b, t):
    """Point at fraction ``t`` along the minimizing great-circle arc from a to b."""
    a, b = normalize(a), normalize(b)
    t = np.asarray(t, dtype=float)[..., None]
    ang = np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))
    if ang < 1e-14:
        return np.broadcast_to(a, t.shape[:-1] + (3,)).copy()
    s = np.sin(ang)
    return (np.sin((1 - t) * ang) * a + np.sin(t * ang) * b) / s


# ---------------------------------------------------------------------------
# charts


class Chart:
    """Coordinates on an open subset of the sphere (or of the plane)."""

    dim = 2
    name = "chart"

    def to_sphere(self, p):
        raise NotImplementedError

    def from_sphere(self, x):
        raise NotImplementedError

    def jacobian(self, p):
        """d(to_sphere)/dp, shape (..., 3, dim)."""
        raise NotImplementedError

    def pushforward_matrix(self, x):
        """Matrix sending ambient tangent vectors at x to chart tangents, (..., dim, 3)."""
        raise NotImplementedError

    def pushforward(self, x, v):
        return np.einsum("...ij,...j->...i", self.pushforward_matrix(x), v)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class PlaneChart(Chart):
    """Identity coordinates on a planar domain (no sphere attached)."""

    name = "plane"

    def to_sphere(self, p):
        raise TypeError("planar chart has no sphere embedding")

    def from_sphere(self, x):
        raise TypeError("planar chart has no sphere embedding")


class AmbientChart(Chart):
    """Ambient coordinates of R^3 restricted to the sphere."""

    dim = 3
    name = "ambient"

    def to_sphere(self, p):
        return normalize(p)

    def from_sphere(self, x):
        return np.asarray(x, dtype=float)

    def jacobian(self, p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3))

    def pushforward_matrix(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.eye(3), x.shape[:-1] + (3, 3))


class StereographicChart(Chart):
    """Stereographic projection from ``pole``; the chart origin is ``-pole``.

    The frame ``(e1, e2)`` satisfies ``e1 x e2 = -pole`` so the chart is
    orientation preserving for the outward orientation of the sphere.
    """

    def __init__(self, pole, e1, name="stereo"):
        self.pole = normalize(pole)
        e1 = np.asarray(e1, dtype=float)
        e1 = normalize(e1 - np.dot(e1, self.pole) * self.pole)
        self.e1 = e1
        self.e2 = np.cross(-self.pole, e1)
        self.name = name

    @property
    def center(self):
        return -self.pole

    def from_sphere(self, x):
        x = np.asarray(x, dtype=float)
        d = 1.0 - x @ self.pole
        return np.stack([x @ self.e1, x @ self.e2], axis=-1) / d[..., None]

    def to_sphere(self, p):
        p = np.asarray(p, dtype=float)
        r2 = np.sum(p**2, axis=-1)[..., None]
        return (2.0 * (p[..., :1] * self.e1 + p[..., 1:] * self.e2) + (r2 - 1.0) * self.pole) / (r2 + 1.0)

    def jacobian(self, p):
        p = np.asarray(p, dtype=float)
        r2 = np.sum(p**2, axis=-1)[..., None, None]
        E = np.stack([self.e1, self.e2], axis=-1)  # (3, 2)
        x_planar = p[..., 0, None] * self.e1 + p[..., 1, None] * self.e2
        num = 2.0 * x_planar[..., :, None] + (r2[..., 0] - 1.0)[..., None] * self.pole[:, None]
        # d/dp of num/(r2+1)
        dnum = 2.0 * E + 2.0 * self.pole[:, None] * p[..., None, :]
        return dnum / (r2 + 1.0) - num * (2.0 * p[..., None, :]) / (r2 + 1.0) ** 2

    def pushforward_matrix(self, x):
        x = np.asarray(x, dtype=float)
        d = (1.0 - x @ self.pole)[..., None, None]
        F = np.stack([self.e1, self.e2], axis=0)  # (2, 3)
        u = np.stack([x @ self.e1, x @ self.e2], axis=-1)
        return F / d + u[..., :, None] * self.pole / d**2

    def conformal_factor(self, p):
        """``x . (x_u x x_v)`` for this chart: ``4 / (1 + |p|^2)^2``."""
        r2 = np.sum(np.asarray(p, dtype=float) ** 2, axis=-1)
        return 4.0 / (1.0 + r2) ** 2


class StripChart(Chart):
    """Universal-cover coordinates ``(angle, height)`` of the polar annulus.

    ``angle`` is the longitude measured from the east pole E and increasing
    counter-clockwise seen from the north pole; ``height`` is the z coordinate.
    Deck transformations are ``angle -> angle + 2 pi``.
    """

    name = "strip"

    def to_sphere(self, p):
        p = np.asarray(p, dtype=float)
        th, z = p[..., 0], p[..., 1]
        r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
        lon = th + 0.5 * np.pi
        return np.stack([r * np.cos(lon), r * np.sin(lon), z], axis=-1)

    def from_sphere(self, x):
        x = np.asarray(x, dtype=float)
        th = np.arctan2(x[..., 1], x[..., 0]) - 0.5 * np.pi
        th = (th + np.pi) % (2 * np.pi) - np.pi
        return np.stack([th, x[..., 2]], axis=-1)

    def jacobian(self, p):
        p = np.asarray(p, dtype=float)
        th, z = p[..., 0], p[..., 1]
        r = np.sqrt(np.clip(1.0 - z**2, 1e-300, None))
        lon = th + 0.5 * np.pi
        c, s = np.cos(lon), np.sin(lon)
        d_th = np.stack([-r * s, r * c, np.zeros_like(r)], axis=-1)
        d_z = np.stack([-z / r * c, -z / r * s, np.ones_like(r)], axis=-1)
        return np.stack([d_th, d_z], axis=-1)

    def pushforward_matrix(self, x):
        x = np.asarray(x, dtype=float)
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        zero = np.zeros_like(rho2)
        row_th = np.stack([-x[..., 1] / rho2, x[..., 0] / rho2, zero], axis=-1)
        row_z = np.stack([zero, zero, np.ones_like(rho2)], axis=-1)
        return np.stack([row_th, row_z], axis=-2)


PLANE = PlaneChart()
AMBIENT = AmbientChart()
STRIP = StripChart()
# V_+ omits the south pole, V_- omits the north pole
V_PLUS = StereographicChart(SOUTH, [1.0, 0.0, 0.0], name="V+")
V_MINUS = StereographicChart(NORTH, [0.0, 1.0, 0.0], name="V-")


# ---------------------------------------------------------------------------
# forms


class OneFormField:
    """Algebra-valued one-form ``sum_a c_a(p) dp^a`` on a chart.

    ``coeffs(p)`` returns an array of shape ``(..., chart.dim, alg_dim)``, so the
    form is linear in the tangent argument by construction.
    """

    def __init__(self, coeffs: Callable, chart: Chart = PLANE, alg_dim: int = 1):
        self.coeffs = coeffs
        self.chart = chart
        self.alg_dim = alg_dim

    def __call__(self, p, v):
        return np.einsum("...a,...ad->...d", np.asarray(v, dtype=float), self.coeffs(np.asarray(p, dtype=float)))

    def on_sphere(self, x, v):
        x = np.asarray(x, dtype=float)
        return self(self.chart.from_sphere(x), self.chart.pushforward(x, v))

    def to_ambient(self):
        if self.chart is AMBIENT:
            return self
        chart, coeffs = self.chart, self.coeffs

        def amb(x):
            M = chart.pushforward_matrix(x)  # (..., k, 3)
            return np.einsum("...ka,...kd->...ad", M, coeffs(chart.from_sphere(x)))

        return OneFormField(amb, AMBIENT, self.alg_dim)

    def to_chart(self, chart):
        if chart is self.chart:
            return self
        amb = self.to_ambient().coeffs

        def local(p):
            J = chart.jacobian(p)  # (..., 3, k)
            return np.einsum("...ak,...ad->...kd", J, amb(chart.to_sphere(p)))

        return OneFormField(local, chart, self.alg_dim)

    def _binary(self, other, op):
        a, b = self, other
        if a.chart is not b.chart:
            a, b = a.to_ambient(), b.to_ambient()
        ca, cb = a.coeffs, b.coeffs
        return OneFormField(lambda p: op(ca(p), cb(p)), a.chart, a.alg_dim)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        c = self.coeffs
        return OneFormField(lambda p: -c(p), self.chart, self.alg_dim)

    def scaled(self, lam):
        c = self.coeffs
        return OneFormField(lambda p: lam * c(p), self.chart, self.alg_dim)

    def transformed(self, matrix_field: Callable):
        """Pointwise ``A(x) eta`` for a field of ``alg_dim x alg_dim`` matrices on the sphere.

        The result is expressed in ambient coordinates unless the form is planar.
        """
        base = self if self.chart is PLANE else self.to_ambient()
        c = base.coeffs

        def coeffs(p):
            A = matrix_field(p)
            return np.einsum("...de,...ae->...ad", A, c(p))

        return OneFormField(coeffs, base.chart, self.alg_dim)

    @classmethod
    def zero(cls, chart=PLANE, alg_dim=1):
        def coeffs(p):
            p = np.asarray(p, dtype=float)
            return np.zeros(p.shape[:-1] + (chart.dim, alg_dim))

        return cls(coeffs, chart, alg_dim)

    @classmethod
    def exact(cls, grad: Callable, chart=AMBIENT):
        """Real one-form ``dh`` from the gradient of ``h`` in chart coordinates."""
        return cls(lambda p: np.asarray(grad(p))[..., None], chart, 1)


class TwoForm:
    """Real two-form ``h(x) dA`` on the sphere, with dA the outward area form."""

    def __init__(self, density: Callable, name="omega"):
        self.density = density
        self.name = name

    def __call__(self, x, v, w):
        x = np.asarray(x, dtype=float)
        return self.density(x) * np.einsum("...i,...i->...", x, np.cross(v, w))

    def __add__(self, other):
        a, b = self.density, other.density
        return TwoForm(lambda x: a(x) + b(x), f"{self.name}+{other.name}")

    def scaled(self, lam):
        a = self.density
        return TwoForm(lambda x: lam * a(x), f"{lam}*{self.name}")

    def in_chart(self, chart):
        """The density ``w`` with ``omega = w dp1 ^ dp2`` on the chart."""
        if isinstance(chart, StereographicChart):
            dens = self.density

            def w(p):
                return dens(chart.to_sphere(p)) * chart.conformal_factor(p)

            return ChartTwoForm(w, chart)

        dens = self.density

        def w_generic(p):
            x = chart.to_sphere(p)
            J = chart.jacobian(p)
            return dens(x) * np.einsum("...i,...i->...", x, np.cross(J[..., 0], J[..., 1]))

        return ChartTwoForm(w_generic, chart)


@dataclass
class ChartTwoForm:
    """Real two-form ``w(p) dp1 ^ dp2`` on a planar chart."""

    density: Callable
    chart: Chart = PLANE

    def __call__(self, p, v, w):
        v, w = np.asarray(v, dtype=float), np.asarray(w, dtype=float)
        return self.density(np.asarray(p, dtype=float)) * (v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0])


def area_form(scale=1.0):
    return TwoForm(lambda x: np.full(np.shape(x)[:-1], float(scale)), name="area")


def bump_form(center=(1.0, 2.0, 3.0), sharpness=8.0, total=1.0):
    """Concentrated two-form ``C exp(-k (1 - x.n)) dA`` with the given total integral."""
    n = normalize(center)
    k = float(sharpness)
    # integral over the sphere of exp(-k (1 - cos)) dA = 2 pi (1 - exp(-2k)) / k
    const = total * k / (2.0 * np.pi * (-np.expm1(-2.0 * k)))

    def density(x):
        return const * np.exp(-k * (1.0 - np.asarray(x) @ n))

    return TwoForm(density, name="bump")


# ---------------------------------------------------------------------------
# degree-d self maps of the sphere


def degree_wrap(x, d):
    """Smooth degree-``d`` self-map fixing E.

    In the stereographic coordinate ``zeta = (x + i y) / (1 + z)`` this is
    ``zeta -> i^(1-d) zeta^d``: a d-fold angular wrap about the polar axis.
    """
    x = np.asarray(x, dtype=float)
    w = x[..., 0] + 1j * x[..., 1]
    s, t = 1.0 + x[..., 2], 1.0 - x[..., 2]
    c = 1j ** (1 - d)
    den = s**d + t**d
    wd = c * w**d * 2.0 / den
    zd = (s**d - t**d) / den
    return np.stack([wd.real, wd.imag, zd], axis=-1)


def degree_wrap_jacobian(x, d):
    """Area scale factor of :func:`degree_wrap` at x (pullback of dA is this times dA)."""
    x = np.asarray(x, dtype=float)
    if d == 0:
        return np.zeros(x.shape[:-1])
    s, t = 1.0 + x[..., 2], 1.0 - x[..., 2]
    return 4.0 * d**2 * (s * t) ** (d - 1) / (s**d + t**d) ** 2


# ---------------------------------------------------------------------------
# square maps


def _circle_family(eps, t):
    # circles through E in the planes containing the z-direction at E
    a, b = np.pi * eps, 2.0 * np.pi * t
    ca, sa = np.cos(a), np.sin(a)
    cb, sb = np.cos(b), np.sin(b)
    x = ca * sa - sa * ca * cb
    y = ca * ca + sa * sa * cb
    z = -sa * sb
    return np.stack([x, y, z], axis=-1)


@dataclass
class SquareMap:
    """Smooth map from the unit square to the sphere collapsing the boundary to E.

    ``func(eps, t)`` is vectorized; derivatives are taken by fourth-order
    central differences unless ``jac`` is supplied.
    """

    func: Callable
    degree: int = 1
    jac: Callable | None = None
    base_point: np.ndarray = field(default_factory=lambda: EAST.copy())
    fd_step: float = 1e-3

    def __call__(self, eps, t):
        return self.func(np.asarray(eps, dtype=float), np.asarray(t, dtype=float))

    def derivatives(self, eps, t):
        """Partial derivatives ``(d/d eps, d/d t)``, each of shape (..., 3)."""
        if self.jac is not None:
            return self.jac(eps, t)
        eps, t = np.asarray(eps, dtype=float), np.asarray(t, dtype=float)
        h = self.fd_step
        f = self.func

        def d(g):
            return (8.0 * (g(h) - g(-h)) - (g(2 * h) - g(-2 * h))) / (12.0 * h)

        return d(lambda s: f(eps + s, t)), d(lambda s: f(eps, t + s))

    def sample(self, n):
        """Node grid ``(n+1) x (n+1)`` including the boundary."""
        g = np.linspace(0.0, 1.0, n + 1)
        E, T = np.meshgrid(g, g, indexing="ij")
        return self(E, T)

    def boundary_residual(self, n=64):
        g = np.linspace(0.0, 1.0, n + 1)
        zero, one = np.zeros_like(g), np.ones_like(g)
        pts = np.concatenate([self(zero, g), self(one, g), self(g, zero), self(g, one)])
        return float(np.max(np.linalg.norm(pts - self.base_point, axis=-1)))

    def composed(self, smap: Callable, degree: int):
        f = self.func
        return SquareMap(lambda e, t: smap(f(e, t)), degree=degree, base_point=self.base_point)

    def concat(self, other):
        """Sum in pi_2: ``self`` on eps in [0, 1/2], ``other`` on [1/2, 1]."""
        f, g = self.func, other.func

        def func(eps, t):
            eps = np.asarray(eps, dtype=float)
            lo = f(np.clip(2.0 * eps, 0.0, 1.0), t)
            hi = g(np.clip(2.0 * eps - 1.0, 0.0, 1.0), t)
            return np.where((eps <= 0.5)[..., None], lo, hi)

        sd, od = self, other

        def jac(eps, t):
            eps, t = np.broadcast_arrays(np.asarray(eps, dtype=float), np.asarray(t, dtype=float))
            le, lt = sd.derivatives(np.clip(2.0 * eps, 0.0, 1.0), t)
            he, ht = od.derivatives(np.clip(2.0 * eps - 1.0, 0.0, 1.0), t)
            lo = (eps <= 0.5)[..., None]
            return np.where(lo, 2.0 * le, 2.0 * he), np.where(lo, lt, ht)

        return SquareMap(func, degree=self.degree + other.degree, jac=jac, base_point=self.base_point)


def unit_square_map():
    """Degree-one square map sweeping the sphere by circles through E.

    Orientation preserving for the order ``(eps, t)``; the eps = 1/2 circle is
    the great circle through E and the poles.
    """

    def func(eps, t):
        return _circle_family(1.0 - eps, t)

    return SquareMap(func, degree=1)


def degree_map(d):
    """Square map of degree ``d`` (d >= 0): the degree-one map followed by the d-fold wrap."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    base = unit_square_map()
    if d == 0:

        def const(eps, t):
            shape = np.broadcast_shapes(np.shape(eps), np.shape(t))
            return np.broadcast_to(EAST, shape + (3,)).copy()

        return SquareMap(const, degree=0)
    if d == 1:
        return base
    return base.composed(lambda x: degree_wrap(x, d), degree=d)


def surface_integral(phi: SquareMap, omega: TwoForm, n=400):
    """Midpoint-rule value of the integral of ``phi^* omega`` over the square."""
    g = (np.arange(n) + 0.5) / n
    E, T = np.meshgrid(g, g, indexing="ij")
    x = phi(E, T)
    xe, xt = phi.derivatives(E, T)
    return float(np.sum(omega(x, xe, xt)) / n**2)


# ---------------------------------------------------------------------------
# local primitives


def local_primitive(omega, chart: Chart | None = None, origin=(0.0, 0.0), nodes=24, check=True):
    """One-form ``theta`` with ``d theta = -omega`` on a star-shaped chart domain.

    Radial homotopy formula about ``origin``:
    ``theta = -(int_0^1 s w(o + s (p - o)) ds) ((p - o)_1 dp_2 - (p - o)_2 dp_1)``.
    The radial integral uses Gauss-Legendre quadrature with ``nodes`` points.
    ``omega`` is a :class:`TwoForm` (then ``chart`` is required) or a
    :class:`ChartTwoForm`.
    """
    if isinstance(omega, TwoForm):
        if chart is None:
            raise ValueError("a chart is required for a sphere two-form")
        cform = omega.in_chart(chart)
    else:
        cform = omega
        chart = cform.chart if chart is None else chart
    w = cform.density
    o = np.asarray(origin, dtype=float)
    s, ws = gauss_legendre(nodes)

    if check:
        probe = chart_probe_points(o)
        vals = np.asarray(w(probe))
        if not np.all(np.isfinite(vals)):
            raise NotClosed("two-form density is not finite on the chart")

    def coeffs(p):
        p = np.asarray(p, dtype=float)
        q = p - o
        pts = o + s[:, None] * q[..., None, :]  # (..., nodes, 2)
        radial = np.einsum("k,...k->...", ws * s, w(pts))
        c = np.stack([radial * q[..., 1], -radial * q[..., 0]], axis=-1)
        return c[..., None]

    return OneFormField(coeffs, chart, 1)


def chart_probe_points(origin, radius=1.0, n=7):
    g = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.stack([X, Y], axis=-1).reshape(-1, 2) + origin


def exterior_derivative(theta: OneFormField, p, step=1e-4):
    """Central-difference value of ``d theta (d1, d2)`` at chart points p."""
    p = np.asarray(p, dtype=float)
    e1, e2 = np.array([step, 0.0]), np.array([0.0, step])
    c = theta.coeffs
    d1_c2 = (c(p + e1)[..., 1, :] - c(p - e1)[..., 1, :]) / (2 * step)
    d2_c1 = (c(p + e2)[..., 0, :] - c(p - e2)[..., 0, :]) / (2 * step)
    return d1_c2 - d2_c1


# ---------------------------------------------------------------------------
# covers


@dataclass
class PolarCover:
    """Two-set cover ``V+ = S^2 - {south}``, ``V- = S^2 - {north}`` and the equator loop."""

    plus: StereographicChart = V_PLUS
    minus: StereographicChart = V_MINUS
    strip: StripChart = STRIP

    def equator(self, t):
        """Counter-clockwise equator loop based at E, in strip coordinates."""
        t = np.asarray(t, dtype=float)
        return np.stack([2.0 * np.pi * t, np.zeros_like(t)], axis=-1)

    def equator_on_sphere(self, t):
        return self.strip.to_sphere(self.equator(t))

    def winding_number(self, n=256):
        t = np.linspace(0.0, 1.0, n + 1)
        x = self.equator_on_sphere(t)
        ang = np.unwrap(np.arctan2(x[:, 1], x[:, 0]))
        return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


def _arc_distance(x, a, b):
    """Geodesic distance from points x to the minor great-circle arc [a, b]."""
    n = normalize(np.cross(a, b))
    proj = x - (x @ n)[..., None] * n
    pn = np.linalg.norm(proj, axis=-1)
    on_arc = (np.cross(a, proj) @ n >= 0) & (np.cross(proj, b) @ n >= 0) & (pn > 1e-15)
    d_plane = np.arcsin(np.clip(np.abs(x @ n), 0.0, 1.0))
    da = np.arccos(np.clip(x @ a, -1.0, 1.0))
    db = np.arccos(np.clip(x @ b, -1.0, 1.0))
    return np.where(on_arc, d_plane, np.minimum(da, db))


class TetraCover:
    """Good cover of the sphere by fattened faces of a spherical tetrahedron.

    Vertices: ``e_3`` is the north pole and ``e_0, e_1, e_2`` lie on the
    equator at longitudes 210, 330 and 90 degrees, so ``e_2 = E`` and the face
    ``F_3`` opposite ``e_3`` is the southern hemisphere, centred at the south
    pole.  ``U_i`` is the set of points within ``margin`` radians of the closed
    face ``F_i`` (the face opposite ``e_i``).  The map from the standard
    simplex boundary is orientation preserving: ``F_0 - F_1 + F_2 - F_3`` is
    the outward fundamental class.
    """

    def __init__(self, margin=0.15, n_samples=40000):
        self.margin = float(margin)
        lon = np.deg2rad([210.0, 330.0, 90.0])
        eq = np.stack([np.cos(lon), np.sin(lon), np.zeros(3)], axis=-1)
        self.vertices = np.vstack([eq, NORTH])
        self.vertices[2] = EAST
        self.n_samples = n_samples
        self._members = {}

    # faces ---------------------------------------------------------------

    def face_vertices(self, i):
        return [j for j in range(4) if j != i]

    def face_center(self, i):
        if i == 3:
            return SOUTH.copy()
        return normalize(self.vertices[self.face_vertices(i)].sum(axis=0))

    def _face_normals(self, i):
        idx = self.face_vertices(i)
        V = self.vertices[idx]
        c = self.face_center(i)
        normals = []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            n = np.cross(V[a], V[b])
            if np.dot(n, c) < 0:
                n = -n
            normals.append(n)
        return np.array(normals), V

    def face_distance(self, i, x):
        x = np.asarray(x, dtype=float)
        normals, V = self._face_normals(i)
        inside = np.all(x @ normals.T >= -1e-15, axis=-1)
        d = np.minimum.reduce([_arc_distance(x, V[a], V[b]) for a, b in ((0, 1), (1, 2), (2, 0))])
        return np.where(inside, 0.0, d)

    def contains(self, i, x):
        return self.face_distance(i, x) < self.margin

    def contains_all(self, simplex, x):
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1], dtype=bool)
        for i in simplex:
            out &= self.contains(i, x)
        return out

    # charts ----------------------------------------------------------------

    def chart(self, i):
        """Stereographic chart centred at the face centre of ``F_i``."""
        c = self.face_center(i)
        helper = NORTH if abs(c[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        return StereographicChart(-c, helper, name=f"U{i}")

    # combinatorics -----------------------------------------------------------

    @cached_property
    def samples(self):
        return np.vstack([fibonacci_sphere(self.n_samples), self.vertices])

    def members(self, simplex):
        key = tuple(simplex)
        if key not in self._members:
            pts = self.samples
            self._members[key] = pts[self.contains_all(key, pts)]
        return self._members[key]

    def nonempty(self, q):
        """Ordered ``(q+1)``-tuples ``i_0 < ... < i_q`` with nonempty intersection."""
        return [s for s in combinations(range(4), q + 1) if len(self.members(s)) > 0]

    def is_connected(self, simplex):
        pts = self.members(simplex)
        if len(pts) == 0:
            return True
        spacing = 4.0 * np.sqrt(4.0 * np.pi / len(self.samples))
        tree = cKDTree(pts)
        graph = tree.sparse_distance_matrix(tree, spacing, output_type="coo_matrix")
        n, _ = connected_components(graph, directed=False)
        return n == 1

    def edge(self, i, j):
        """Endpoints of the shared edge ``F_i cap F_j`` (the two other vertices)."""
        a, b = [k for k in range(4) if k not in (i, j)]
        return a, b

    def reference_point(self, i, j):
        """Midpoint of the shared edge of ``F_i`` and ``F_j``."""
        a, b = self.edge(i, j)
        return normalize(self.vertices[a] + self.vertices[b])

    def random_points(self, simplex, n, rng):
        pts = self.members(simplex)
        idx = rng.choice(len(pts), size=min(n, len(pts)), replace=False)
        return pts[idx]

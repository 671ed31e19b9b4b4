"""Integrability obstructions of transitive Lie algebroids over the sphere.

Three independent computations are provided:

* the Mackenzie pairing: integrate transition forms on the tetrahedral cover
  to ``s_ij``, build ``e_ijk = s_jk s_ik^{-1} s_ij`` and evaluate the
  fundamental-class pairing;
* the Crainic-Fernandes monodromy: solve the homotopy equation over a square
  map collapsing its boundary to E and integrate the final isotropy path;
* the Meinrenken clutching value: monodromy of the gluing gauge transformation
  on the polar annulus along the equator.

For a correct implementation ``pairing = monodromy^{-1}`` and
``monodromy = clutching``.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .cech import OrderedCochain2, fundamental_pairing, is_cocycle
from .geometry import (
    AMBIENT,
    STRIP,
    NotClosed,
    V_MINUS,
    V_PLUS,
    OneFormField,
    SquareMap,
    TetraCover,
    TwoForm,
    area_form,
    degree_map,
    degree_wrap,
    degree_wrap_jacobian,
    fibonacci_sphere,
    geodesic,
    local_primitive,
    normalize,
)
from .lie_core import (
    REALS,
    SU2_MODEL,
    TAU_CENTER,
    CenterElement,
    GroupModel,
    NotCentral,
    identify_center,
)
from .maurer_cartan import (
    PathSample,
    integrate_along_path,
    mc_residual,
    quasiperiodic_solve,
)

__all__ = [
    "CenterMismatch",
    "SignConventions",
    "DEFAULT_SIGNS",
    "PrequantizationSpec",
    "GluedSpec",
    "TransitionDataSpec",
    "ObstructionReport",
    "validate_transition_data",
    "mackenzie_cocycle",
    "mackenzie_pairing",
    "solve_homotopy",
    "integrate_isotropy_path",
    "cf_monodromy_prequantization",
    "cf_monodromy_trivial",
    "clutching_value",
    "clutching_analysis",
    "prequantization_to_transition_data",
    "transition_data_from_primitives",
    "glued_to_transition_data",
    "glued_from_prequantization",
    "so3_clutching_spec",
    "abelian_glued_spec",
    "trivial_glued_spec",
    "pullback_spec",
    "verify_theorem1",
    "calibrate",
]


class CenterMismatch(ValueError):
    """A Mackenzie cocycle value is not central."""


@dataclass(frozen=True)
class SignConventions:
    """Orientation signs: equator direction, homotopy source sign, pairing sign."""

    equator: int = 1
    evolution: int = 1
    pairing: int = 1

    def to_json(self, tolerance):
        return json.dumps({**asdict(self), "tolerance": tolerance}, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(int(data["equator"]), int(data["evolution"]), int(data["pairing"]))


# Frozen output of :func:`calibrate` on the unit-sphere area form.
DEFAULT_SIGNS = SignConventions(1, 1, 1)


# ---------------------------------------------------------------------------
# specifications


@dataclass
class PrequantizationSpec:
    """The algebroid ``TS^2 + R`` with bracket twisted by the closed two-form ``omega``."""

    omega: TwoForm
    name: str = "prequantization"

    model = REALS

    def __post_init__(self):
        # On a surface every smooth two-form is closed; what can fail is smoothness.
        vals = np.asarray(self.omega.density(fibonacci_sphere(2000)))
        if not np.all(np.isfinite(vals)):
            raise NotClosed("two-form density is not finite on the sphere")

    def scaled(self, lam):
        return PrequantizationSpec(self.omega.scaled(lam), f"{lam}*{self.name}")


@dataclass
class GluedSpec:
    """Algebroid glued from trivial pieces over ``V+`` and ``V-``.

    The gluing automorphism of ``TV x g`` is ``X + xi -> X + theta(X) + Phi(xi)``;
    ``Phi(x)`` returns the ``dim x dim`` matrix at a sphere point.  The framing
    at E is the identity.
    """

    model: GroupModel
    theta: OneFormField
    Phi: Callable
    name: str = "glued"

    @property
    def theta_strip(self):
        return self.theta.to_chart(STRIP)

    def compatibility_residual(self, n=32, height=0.3, step=1e-5):
        """Max of ``|d Phi(v) - ad(theta(v)) Phi|`` on annulus samples."""
        th = self.theta_strip
        ang = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        z = np.linspace(-height, height, 5)
        A, Z = np.meshgrid(ang, z, indexing="ij")
        p = np.stack([A, Z], axis=-1).reshape(-1, 2)
        worst = 0.0
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = step
            dPhi = (self.Phi(STRIP.to_sphere(p + e)) - self.Phi(STRIP.to_sphere(p - e))) / (2 * step)
            v = np.zeros_like(p)
            v[:, axis] = 1.0
            ad = self.model.ad_matrix(th(p, v))
            res = dPhi - ad @ self.Phi(STRIP.to_sphere(p))
            worst = max(worst, float(np.max(np.abs(res))))
        return worst

    def framing_residual(self):
        return float(np.max(np.abs(self.Phi(np.array([0.0, 1.0, 0.0])) - np.eye(self.model.dim))))


@dataclass
class TransitionDataSpec:
    """Transition data ``{a_ij, chi_ij}`` on the tetrahedral cover, for ``i < j``.

    ``a[(i, j)](x)`` is a matrix in Aut(g); ``chi[(i, j)]`` is a one-form in
    ambient coordinates.
    """

    cover: TetraCover
    model: GroupModel
    a: dict
    chi: dict
    name: str = "transition-data"


# ---------------------------------------------------------------------------
# constructors


def _identity_field(dim):
    def field_(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.eye(dim), x.shape[:-1] + (dim, dim)).copy()

    return field_


def trivial_glued_spec(model: GroupModel = SU2_MODEL):
    return GluedSpec(model, OneFormField.zero(STRIP, model.dim), _identity_field(model.dim), name="trivial")


def abelian_glued_spec(c, exact_part: Callable | None = None):
    """Abelian gluing ``theta = (c / 2 pi) d angle`` (plus ``dh`` if a strip gradient is given)."""

    def coeffs(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1] + (2, 1))
        out[..., 0, 0] = c / (2 * np.pi)
        if exact_part is not None:
            out[..., :, 0] += exact_part(p)
        return out

    return GluedSpec(REALS, OneFormField(coeffs, STRIP, 1), _identity_field(1), name=f"abelian({c})")


def so3_clutching_spec(winding=1, twist=0.0):
    """Gluing from the SO(3) loop ``sigma = Ad(exp(g(z) b_1) exp(k angle b_3))``.

    ``g(z) = twist * sin(pi z / 2)`` vanishes on the equator, so the framing at
    E is the identity.  ``theta = Delta(sigma)`` and ``Phi = Ad o sigma``; the
    isotropy algebra is su(2) = so(3) and the simply connected group is SU(2).
    """
    k = int(winding)
    model = SU2_MODEL

    def g(z):
        return twist * np.sin(0.5 * np.pi * z)

    def dg(z):
        return twist * 0.5 * np.pi * np.cos(0.5 * np.pi * z)

    def coeffs(p):
        p = np.asarray(p, dtype=float)
        z = p[..., 1]
        zero = np.zeros_like(z)
        b3 = np.stack([zero, zero, np.full_like(z, float(k))], axis=-1)
        R1 = model.Ad_matrix(model.exp(np.stack([g(z), zero, zero], axis=-1)))
        d_angle = np.einsum("...ij,...j->...i", R1, b3)
        d_height = np.stack([dg(z), zero, zero], axis=-1)
        return np.stack([d_angle, d_height], axis=-2)

    def Phi(x):
        p = STRIP.from_sphere(x)
        th, z = p[..., 0], p[..., 1]
        zero = np.zeros_like(z)
        s = model.mul(
            model.exp(np.stack([g(z), zero, zero], axis=-1)),
            model.exp(np.stack([zero, zero, k * th], axis=-1)),
        )
        return model.Ad_matrix(s)

    return GluedSpec(model, OneFormField(coeffs, STRIP, 3), Phi, name=f"so3-winding-{k}")


def glued_from_prequantization(spec: PrequantizationSpec):
    """Gluing ``Psi_-^{-1} Psi_+`` for primitives ``d theta_pm = -omega`` on ``V_pm``."""
    theta_plus = local_primitive(spec.omega, V_PLUS)
    theta_minus = local_primitive(spec.omega, V_MINUS)
    theta = (theta_plus.to_ambient() - theta_minus.to_ambient()).to_chart(STRIP)
    return GluedSpec(REALS, theta, _identity_field(1), name=f"glued({spec.name})")


def transition_data_from_primitives(thetas, cover: TetraCover, name="prequantization"):
    """Abelian transition data ``chi_ij = theta_j - theta_i``, ``a_ij = 1``."""
    amb = [t.to_ambient() for t in thetas]
    chi = {(i, j): amb[j] - amb[i] for i, j in cover.nonempty(1)}
    a = {(i, j): _identity_field(1) for i, j in cover.nonempty(1)}
    return TransitionDataSpec(cover, REALS, a, chi, name=name)


def prequantization_to_transition_data(spec: PrequantizationSpec, cover: TetraCover | None = None, shifts=None):
    """Transition data from radial primitives on each ``U_i``.

    ``shifts`` optionally adds exact forms ``d h_i`` (given as one-forms) to the
    primitives; the resulting class must not change.
    """
    cover = TetraCover() if cover is None else cover
    thetas = []
    for i in range(4):
        th = local_primitive(spec.omega, cover.chart(i))
        if shifts is not None and shifts[i] is not None:
            th = th.to_ambient() + shifts[i]
        thetas.append(th)
    return transition_data_from_primitives(thetas, cover, name=spec.name)


def glued_to_transition_data(spec: GluedSpec, cover: TetraCover | None = None):
    """Transition data on the tetrahedral cover induced by a polar gluing.

    ``U_0, U_1, U_2`` refine ``V+`` and ``U_3`` refines ``V-``; the nontrivial
    transitions are ``Psi_+^{-1} Psi_- = (Psi_-^{-1} Psi_+)^{-1}`` on ``U_i3``:
    ``chi_i3 = -Phi^{-1} theta`` and ``a_i3 = Phi^{-1}``.
    """
    cover = TetraCover() if cover is None else cover
    d = spec.model.dim
    theta_amb = spec.theta.to_ambient()

    def Phi_inv(x):
        return np.linalg.inv(spec.Phi(x))

    chi, a = {}, {}
    for i, j in cover.nonempty(1):
        if j == 3:
            chi[(i, j)] = -(theta_amb.transformed(Phi_inv))
            a[(i, j)] = Phi_inv
        else:
            chi[(i, j)] = OneFormField.zero(AMBIENT, d)
            a[(i, j)] = _identity_field(d)
    return TransitionDataSpec(cover, spec.model, a, chi, name=f"tetra({spec.name})")


def pullback_spec(spec: PrequantizationSpec, d: int):
    """Pullback of ``omega`` along the degree-``d`` wrap of the sphere."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    dens = spec.omega.density

    def density(x):
        return dens(degree_wrap(x, d)) * degree_wrap_jacobian(x, d)

    return PrequantizationSpec(TwoForm(density, name=f"wrap{d}*{spec.omega.name}"), name=f"pullback{d}({spec.name})")


# ---------------------------------------------------------------------------
# transition data validation


def _tangent_frame(x):
    helper = np.where(np.abs(x[..., 2:3]) < 0.9, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    u = normalize(np.cross(x, helper))
    v = np.cross(x, u)
    return u, v


def validate_transition_data(spec: TransitionDataSpec, n=40, seed=0, fd_step=1e-5):
    """Residuals of the three transition-data conditions (never raises).

    ``mc``: flatness of each ``chi_ij`` on samples of ``U_ij``;
    ``twisted_cocycle``: ``chi_ik - chi_ij - a_ij(chi_jk)`` on ``U_ijk``;
    ``darboux_a``: ``(d a_ij) a_ij^{-1} - ad(chi_ij)`` on ``U_ij``.
    """
    rng = np.random.default_rng(seed)
    cover, model = spec.cover, spec.model
    res = {"mc": 0.0, "twisted_cocycle": 0.0, "darboux_a": 0.0}
    for (i, j), chi in sorted(spec.chi.items()):
        pts = cover.random_points((i, j), n, rng)
        chart = cover.chart(i)
        local = chi.to_chart(chart)
        res["mc"] = max(res["mc"], mc_residual(local, chart.from_sphere(pts), model))
        u, v = _tangent_frame(pts)
        for w in (u, v):
            A0 = spec.a[(i, j)](pts)
            Ap = spec.a[(i, j)](normalize(pts + fd_step * w))
            Am = spec.a[(i, j)](normalize(pts - fd_step * w))
            dA = (Ap - Am) / (2 * fd_step) @ np.linalg.inv(A0)
            adchi = model.ad_matrix(chi.on_sphere(pts, w))
            res["darboux_a"] = max(res["darboux_a"], float(np.max(np.abs(dA - adchi))))
    for i, j, k in cover.nonempty(2):
        pts = cover.random_points((i, j, k), n, rng)
        u, v = _tangent_frame(pts)
        for w in (u, v):
            lhs = spec.chi[(i, k)].on_sphere(pts, w)
            rhs = spec.chi[(i, j)].on_sphere(pts, w) + np.einsum(
                "...ab,...b->...a", spec.a[(i, j)](pts), spec.chi[(j, k)].on_sphere(pts, w)
            )
            res["twisted_cocycle"] = max(res["twisted_cocycle"], float(np.max(np.abs(lhs - rhs))))
    return res


# ---------------------------------------------------------------------------
# Mackenzie class


class _TransitionIntegrals:
    """Lazily computed ``s_ij`` with ``Delta(s_ij) = chi_ij`` and ``Ad(s_ij) = a_ij`` at the edge midpoint."""

    def __init__(self, spec: TransitionDataSpec, steps):
        self.spec = spec
        self.steps = steps
        self._start = {}
        self._value = lru_cache(maxsize=None)(self._compute)

    def start(self, pair):
        if pair not in self._start:
            ref = self.spec.cover.reference_point(*pair)
            A = self.spec.a[pair](ref)
            self._start[pair] = self.spec.model.lift_adjoint(A)
        return self._start[pair]

    def _compute(self, pair, key):
        x = np.array(key)
        ref = self.spec.cover.reference_point(*pair)
        path = PathSample.from_function(lambda t: geodesic(ref, x, t), self.steps, AMBIENT)
        return integrate_along_path(self.spec.chi[pair], path, self.spec.model, start=self.start(pair))

    def __call__(self, pair, x):
        return self._value(tuple(pair), tuple(np.round(np.asarray(x, dtype=float), 15)))


def mackenzie_cocycle(spec: TransitionDataSpec, steps=2048, center_tol=TAU_CENTER):
    """The cocycle ``e_ijk = s_jk s_ik^{-1} s_ij`` as central-valued functions on ``U_ijk``."""
    model = spec.model
    s = _TransitionIntegrals(spec, steps)

    def entry(i, j, k):
        def e(x):
            g = model.mul(model.mul(s((j, k), x), model.inv(s((i, k), x))), s((i, j), x))
            try:
                return identify_center(model, g, center_tol)
            except NotCentral as exc:
                raise CenterMismatch(f"e_{i}{j}{k} is not central: {exc}") from exc

        return e

    vals = {(i, j, k): entry(i, j, k) for i, j, k in spec.cover.nonempty(2)}
    return OrderedCochain2(vals, spec.cover)


def mackenzie_pairing(spec, steps=2048, signs: SignConventions = DEFAULT_SIGNS, cover=None):
    """Pairing of the Mackenzie class with the fundamental class of the sphere."""
    if isinstance(spec, PrequantizationSpec):
        spec = prequantization_to_transition_data(spec, cover)
    elif isinstance(spec, GluedSpec):
        spec = glued_to_transition_data(spec, cover)
    value = fundamental_pairing(mackenzie_cocycle(spec, steps))
    return value if signs.pairing == 1 else value.inverse()


# ---------------------------------------------------------------------------
# Crainic-Fernandes monodromy


def _dt(beta, h):
    out = np.empty_like(beta)
    out[:, 1:-1] = (beta[:, 2:] - beta[:, :-2]) / (2 * h)
    out[:, 0] = (-3 * beta[:, 0] + 4 * beta[:, 1] - beta[:, 2]) / (2 * h)
    out[:, -1] = (3 * beta[:, -1] - 4 * beta[:, -2] + beta[:, -3]) / (2 * h)
    return out


def solve_homotopy(model: GroupModel, beta, source, sign=1):
    """Solve ``d_eps alpha = d_t beta + ad(beta, alpha) + sign * source`` with ``alpha(0, t) = 0``.

    ``beta`` and ``source`` are node arrays of shape ``(n+1, n+1, dim)`` indexed
    by ``(eps, t)``.  Heun steps in eps, second-order differences in t.
    Returns ``alpha`` on all nodes.
    """
    n = beta.shape[0] - 1
    h = 1.0 / n
    dtb = _dt(beta, h)
    forcing = dtb + sign * source
    alpha = np.zeros_like(beta)

    def rhs(i, a):
        return forcing[i] + model.ad(beta[i], a)

    for i in range(n):
        k1 = rhs(i, alpha[i])
        k2 = rhs(i + 1, alpha[i] + h * k1)
        alpha[i + 1] = alpha[i] + 0.5 * h * (k1 + k2)
    return alpha


def integrate_isotropy_path(model, a1):
    """Endpoint of ``Delta(g) = a1 dt`` with trapezoid-averaged increments."""
    n = a1.shape[0] - 1
    X = 0.5 * (a1[:-1] + a1[1:]) / n
    g = model.identity()
    if model.name == "R":
        return g + X.sum(axis=0)[None, :]
    for Xk in model.exp(X):
        g = model.mul(Xk, g)
    return g


def cf_monodromy_prequantization(
    spec: PrequantizationSpec, phi: SquareMap | None = None, n=400, signs: SignConventions = DEFAULT_SIGNS
):
    """Crainic-Fernandes monodromy of ``A_omega`` on the class of ``phi``.

    With the connection ``X -> X + 0`` the vertical part ``alpha`` of ``a``
    solves ``d_eps alpha = omega(d_t phi, d_eps phi)``, ``alpha(0, t) = 0``.
    """
    phi = degree_map(1) if phi is None else phi
    g = np.linspace(0.0, 1.0, n + 1)
    E, T = np.meshgrid(g, g, indexing="ij")
    x = phi(E, T)
    xe, xt = phi.derivatives(E, T)
    source = spec.omega(x, xt, xe)[..., None]
    beta = np.zeros_like(source)
    alpha = solve_homotopy(REALS, beta, source, sign=signs.evolution)
    return identify_center(REALS, integrate_isotropy_path(REALS, alpha[-1]))


def cf_monodromy_trivial(model: GroupModel, phi: SquareMap, theta: OneFormField, n=128, center_tol=TAU_CENTER):
    """Monodromy of the trivial algebroid ``TU x g`` with flat connection ``theta`` on a chart.

    ``phi`` maps the square into the chart coordinates of ``theta``.
    """
    g = np.linspace(0.0, 1.0, n + 1)
    E, T = np.meshgrid(g, g, indexing="ij")
    p = phi(E, T)
    pe, _ = phi.derivatives(E, T)
    beta = theta(p, pe)
    alpha = solve_homotopy(model, beta, np.zeros_like(beta))
    return identify_center(model, integrate_isotropy_path(model, alpha[-1]), center_tol)


# ---------------------------------------------------------------------------
# Meinrenken clutching


def clutching_analysis(spec: GluedSpec, steps=2048, center_tol=TAU_CENTER, signs: SignConventions = DEFAULT_SIGNS):
    """Clutching value with diagnostics.

    Returns ``(value, residuals, solution)``; residuals hold the flatness of
    theta, the compatibility of Phi, the quasi-periodicity of f and the
    mismatch ``|Ad_f - Phi|`` along the equator.
    """
    model = spec.model
    theta = spec.theta_strip
    sol = quasiperiodic_solve(theta, model, steps_per_turn=steps, periods=2, height_steps=32)
    ang = sol.angles[:steps]
    j0 = int(np.argmin(np.abs(sol.heights)))
    f_eq = sol.values[:steps, j0]
    x_eq = STRIP.to_sphere(np.stack([ang, np.zeros_like(ang)], axis=-1))
    ad_mismatch = float(np.max(np.abs(model.Ad_matrix(f_eq) - spec.Phi(x_eq))))
    residuals = {
        "mc_theta": mc_residual(theta, _annulus_points(), model),
        "compatibility": spec.compatibility_residual(),
        "framing": spec.framing_residual(),
        "quasi_periodicity": sol.quasi_periodicity_residual(),
        "ad_f_vs_phi": ad_mismatch,
    }
    rho = sol.rho_generator if signs.equator == 1 else model.inv(sol.rho_generator)
    return identify_center(model, rho, center_tol), residuals, sol


def _annulus_points(n=64, height=0.5):
    ang = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    z = np.linspace(-height, height, 9)
    A, Z = np.meshgrid(ang, z, indexing="ij")
    return np.stack([A, Z], axis=-1).reshape(-1, 2)


def clutching_value(spec: GluedSpec, steps=2048, center_tol=TAU_CENTER, signs: SignConventions = DEFAULT_SIGNS):
    """``rho(1_S)`` of the quasi-periodic integral of the gluing form."""
    return clutching_analysis(spec, steps, center_tol, signs)[0]


# ---------------------------------------------------------------------------
# reports


@dataclass
class ObstructionReport:
    mackenzie_pairing: CenterElement
    cf_monodromy: CenterElement | None
    clutching: CenterElement | None
    residuals: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    theorem1_identity: bool = False
    timings: dict = field(default_factory=dict)

    def obstructions(self):
        def enc(c):
            return None if c is None else c.to_json()

        return {
            "mackenzie": enc(self.mackenzie_pairing),
            "crainic_fernandes": enc(self.cf_monodromy),
            "meinrenken": enc(self.clutching),
        }


def _identity_holds(pairing, cf, clutching, rtol, atol):
    checks = []
    if cf is not None:
        checks.append(pairing.close_to(cf.inverse(), rtol, atol))
        if clutching is not None:
            checks.append(cf.close_to(clutching, rtol, atol))
    elif clutching is not None:
        checks.append(pairing.close_to(clutching.inverse(), rtol, atol))
    return bool(checks) and all(checks)


def verify_theorem1(
    spec,
    grid=400,
    steps=2048,
    rtol=1e-2,
    atol=1e-8,
    center_tol=TAU_CENTER,
    signs: SignConventions = DEFAULT_SIGNS,
    cover: TetraCover | None = None,
):
    """Compute every available obstruction of ``spec`` and check their relations."""
    cover = TetraCover() if cover is None else cover
    timings, residuals = {}, {}
    params = {"grid": grid, "steps": steps, "rtol": rtol, "center_tol": center_tol}

    t0 = time.perf_counter()
    if isinstance(spec, PrequantizationSpec):
        tdata = prequantization_to_transition_data(spec, cover)
    else:
        tdata = glued_to_transition_data(spec, cover)
    for k, v in validate_transition_data(tdata).items():
        residuals[f"transition_{k}"] = v
    cocycle = mackenzie_cocycle(tdata, steps, center_tol)
    pairing = fundamental_pairing(cocycle)
    if signs.pairing != 1:
        pairing = pairing.inverse()
    residuals["cocycle"] = is_cocycle(cocycle)[1]
    timings["mackenzie"] = time.perf_counter() - t0

    cf = None
    if isinstance(spec, PrequantizationSpec):
        t0 = time.perf_counter()
        cf = cf_monodromy_prequantization(spec, degree_map(1), grid, signs)
        timings["crainic_fernandes"] = time.perf_counter() - t0
        glued = glued_from_prequantization(spec)
    else:
        glued = spec

    t0 = time.perf_counter()
    clutch, cres, _ = clutching_analysis(glued, steps, center_tol, signs)
    residuals.update({f"clutching_{k}": v for k, v in cres.items()})
    timings["meinrenken"] = time.perf_counter() - t0

    ok = _identity_holds(pairing, cf, clutch, rtol, atol)
    return ObstructionReport(pairing, cf, clutch, residuals, params, ok, timings)


def calibrate(grid=400, steps=2048, cover=None):
    """Fix the orientation signs from the area-form anchors.

    Anchors on the unit sphere: monodromy ``-4 pi``, clutching equal to the
    monodromy, and pairing ``+4 pi``.  Raw values are computed with all
    signs ``+1``; each sign is the one that maps the raw value to its anchor.
    """
    raw = SignConventions(1, 1, 1)
    spec = PrequantizationSpec(area_form())
    total = 4 * np.pi
    cf = cf_monodromy_prequantization(spec, degree_map(1), grid, raw).value
    clutch = clutching_value(glued_from_prequantization(spec), steps, signs=raw).value
    pairing = mackenzie_pairing(spec, steps, raw, cover).value

    def sign(raw_value, anchor):
        return 1 if raw_value * anchor > 0 else -1

    return SignConventions(equator=sign(clutch, -total), evolution=sign(cf, -total), pairing=sign(pairing, total))

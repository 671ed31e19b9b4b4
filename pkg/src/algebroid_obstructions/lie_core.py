"""Matrix Lie groups used by the obstruction computations.

Four models are provided: the additive reals, U(1), SU(2) and SO(3).  Algebra
vectors are coordinate arrays of shape ``(..., dim)`` in a fixed basis, group
elements are arrays of shape ``(..., m, m)``.  Every operation broadcasts over
leading axes.

Bracket convention: :meth:`GroupModel.ad` is the matrix commutator of the basis
representatives.  The right-invariant bracket is its negative; see
:func:`GroupModel.right_bracket`.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CenterElement",
    "Real",
    "Sign",
    "Trivial",
    "GroupModel",
    "RealLine",
    "U1",
    "SU2",
    "SO3",
    "REALS",
    "CIRCLE",
    "SU2_MODEL",
    "SO3_MODEL",
    "LieCoreError",
    "OutOfInjectivityRadius",
    "NotCentral",
    "covering_project",
    "covering_lift",
    "identify_center",
    "PAULI",
    "TAU_GROUP",
    "TAU_CENTER",
]

TAU_GROUP = 1e-9
TAU_CENTER = 1e-4

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class LieCoreError(ValueError):
    pass


class OutOfInjectivityRadius(LieCoreError):
    """The logarithm was requested at or beyond the cut locus of ``exp``."""


class NotCentral(LieCoreError):
    """A group element is not within tolerance of any central element."""


# ---------------------------------------------------------------------------
# center elements


class CenterElement:
    """Value in the center of the simply connected group."""

    def __mul__(self, other):
        raise NotImplementedError

    def inverse(self):
        raise NotImplementedError

    def is_identity(self, tol=TAU_CENTER):
        raise NotImplementedError

    def close_to(self, other, rtol=0.0, atol=TAU_CENTER):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Real(CenterElement):
    """Element of the additive group of reals (centers of R and the lift of U(1))."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"Real center value must be finite, got {self.value}")

    def __mul__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        return Real(self.value + other.value)

    def __pow__(self, k):
        return Real(k * self.value)

    def inverse(self):
        return Real(-self.value)

    def is_identity(self, tol=TAU_CENTER):
        return abs(self.value) <= tol

    def close_to(self, other, rtol=0.0, atol=TAU_CENTER):
        if not isinstance(other, Real):
            return False
        scale = max(abs(self.value), abs(other.value))
        return abs(self.value - other.value) <= atol + rtol * scale

    def to_json(self):
        return float(self.value)


@dataclass(frozen=True)
class Sign(CenterElement):
    """Element of Z(SU(2)) = {+1, -1}."""

    value: int

    def __post_init__(self):
        if self.value not in (1, -1):
            raise ValueError(f"Sign must be +1 or -1, got {self.value}")

    def __mul__(self, other):
        if not isinstance(other, Sign):
            return NotImplemented
        return Sign(self.value * other.value)

    def __pow__(self, k):
        return Sign(self.value ** (int(k) % 2))

    def inverse(self):
        return self

    def is_identity(self, tol=TAU_CENTER):
        return self.value == 1

    def close_to(self, other, rtol=0.0, atol=TAU_CENTER):
        return isinstance(other, Sign) and other.value == self.value

    def to_json(self):
        return int(self.value)


@dataclass(frozen=True)
class Trivial(CenterElement):
    """The only element of a trivial center."""

    def __mul__(self, other):
        if not isinstance(other, Trivial):
            return NotImplemented
        return self

    def __pow__(self, k):
        return self

    def inverse(self):
        return self

    def is_identity(self, tol=TAU_CENTER):
        return True

    def close_to(self, other, rtol=0.0, atol=TAU_CENTER):
        return isinstance(other, Trivial)

    def to_json(self):
        return 0


# ---------------------------------------------------------------------------
# group models


def _structure_constants(basis, ad):
    d = len(basis)
    c = np.zeros((d, d, d))
    eye = np.eye(d)
    for i in range(d):
        for j in range(d):
            c[i, j] = ad(eye[i], eye[j])
    return c


class GroupModel(metaclass=abc.ABCMeta):
    """A concrete matrix Lie group with a fixed algebra basis."""

    name: str
    dim: int
    matrix_size: int

    @property
    @abc.abstractmethod
    def basis(self):
        """Matrices representing the canonical algebra basis, shape (dim, m, m)."""

    def identity(self):
        return np.eye(self.matrix_size, dtype=self.basis.dtype)

    def zero(self):
        return np.zeros(self.dim)

    @property
    def abelian(self):
        return False

    @property
    def structure_constants(self):
        """Array ``c[i, j, k]`` with ``ad(b_i, b_j) = sum_k c[i, j, k] b_k``."""
        return _structure_constants(self.basis, self.ad)

    def hat(self, X):
        X = np.asarray(X, dtype=float)
        return np.einsum("...k,kij->...ij", X, self.basis)

    @abc.abstractmethod
    def vee(self, A):
        """Coordinates of an algebra matrix in the canonical basis."""

    @abc.abstractmethod
    def exp(self, X):
        pass

    @abc.abstractmethod
    def log(self, g):
        pass

    def mul(self, g, h):
        return g @ h

    def inv(self, g):
        return np.linalg.inv(g)

    def ad(self, X, Y):
        A, B = self.hat(X), self.hat(Y)
        return self.vee(A @ B - B @ A)

    def right_bracket(self, X, Y):
        """Bracket induced by right-invariant vector fields, ``-ad(X, Y)``."""
        return -self.ad(X, Y)

    def ad_matrix(self, X):
        """Matrix of ``ad_X`` acting on coordinates, shape (..., dim, dim)."""
        X = np.asarray(X, dtype=float)
        return np.einsum("...i,ijk->...kj", X, self.structure_constants)

    def Ad(self, g, X):
        A = self.hat(X)
        return self.vee(g @ A @ self.inv(g))

    def Ad_matrix(self, g):
        """Matrix of ``Ad_g`` acting on coordinates, shape (..., dim, dim)."""
        g = np.asarray(g)
        eye = np.eye(self.dim)
        cols = [self.Ad(g, eye[k]) for k in range(self.dim)]
        return np.stack(cols, axis=-1)

    def distance(self, g, h):
        return np.linalg.norm(np.asarray(g) - np.asarray(h), axis=(-2, -1))

    def membership_residual(self, g):
        """Distance of ``g`` from the group manifold (0 for exact elements)."""
        return 0.0

    def lift_adjoint(self, A):
        """An element ``g`` of this group with ``Ad_matrix(g) = A``."""
        raise NotImplementedError(f"{self.name} has no adjoint lift")

    def center_of(self, g, tol=TAU_CENTER):
        raise NotImplementedError

    def __repr__(self):
        return f"<GroupModel {self.name}>"


class RealLine(GroupModel):
    """The additive group of real numbers, stored as 1x1 matrices."""

    name = "R"
    dim = 1
    matrix_size = 1
    _basis = np.ones((1, 1, 1))

    @property
    def basis(self):
        return self._basis

    @property
    def abelian(self):
        return True

    def identity(self):
        return np.zeros((1, 1))

    def vee(self, A):
        return np.asarray(A, dtype=float)[..., 0, :]

    def exp(self, X):
        return self.hat(X)

    def log(self, g):
        return self.vee(g)

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -np.asarray(g)

    def ad(self, X, Y):
        return np.zeros(np.broadcast_shapes(np.shape(X), np.shape(Y)))

    def Ad(self, g, X):
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(X, np.broadcast_shapes(np.shape(g)[:-2] + (1,), X.shape)).copy()

    def lift_adjoint(self, A):
        return self.identity()

    def center_of(self, g, tol=TAU_CENTER):
        return Real(float(np.asarray(g).reshape(-1)[0]))


class U1(GroupModel):
    """Unit complex numbers; algebra coordinate x stands for ``i x``."""

    name = "U(1)"
    dim = 1
    matrix_size = 1
    _basis = np.full((1, 1, 1), 1j)

    @property
    def basis(self):
        return self._basis

    @property
    def abelian(self):
        return True

    def vee(self, A):
        return np.imag(np.asarray(A))[..., 0, :]

    def exp(self, X):
        return np.exp(self.hat(X))

    def log(self, g):
        return np.angle(np.asarray(g))[..., 0, :]

    def inv(self, g):
        return np.conj(g)

    def ad(self, X, Y):
        return np.zeros(np.broadcast_shapes(np.shape(X), np.shape(Y)))

    def Ad(self, g, X):
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(X, np.broadcast_shapes(np.shape(g)[:-2] + (1,), X.shape)).copy()

    def membership_residual(self, g):
        return np.abs(np.abs(np.asarray(g)[..., 0, 0]) - 1.0)

    def lift_adjoint(self, A):
        return self.identity()

    def center_of(self, g, tol=TAU_CENTER):
        # the real lift of the principal angle
        return Real(float(self.log(g).reshape(-1)[0]))


class SU2(GroupModel):
    """SU(2) with basis ``b_k = -(i/2) sigma_k`` so that ``[b_1, b_2] = b_3``."""

    name = "SU(2)"
    dim = 3
    matrix_size = 2
    _basis = -0.5j * PAULI

    @property
    def basis(self):
        return self._basis

    def vee(self, A):
        # tr(b_j b_k) = -delta_jk / 2
        A = np.asarray(A)
        return -2.0 * np.real(np.einsum("...ij,kji->...k", A, self._basis))

    def exp(self, X):
        X = np.asarray(X, dtype=float)
        theta = np.linalg.norm(X, axis=-1)
        half = 0.5 * theta
        # sin(theta/2)/theta, smooth at 0
        sinc = 0.5 * np.sinc(half / np.pi)
        c = np.cos(half)
        # exp(-(i/2) X.sigma) = cos(|X|/2) I - i sin(|X|/2) n.sigma
        A = np.einsum("...k,kij->...ij", X, PAULI)
        eye = np.eye(2, dtype=complex)
        return c[..., None, None] * eye - 1j * sinc[..., None, None] * A

    def log(self, g, tol=TAU_GROUP):
        g = np.asarray(g, dtype=complex)
        a = 0.5 * np.real(np.trace(g, axis1=-2, axis2=-1))
        # g = a I - i v.sigma with v_k = Re(i tr(g sigma_k))/2
        v = 0.5 * np.real(1j * np.einsum("...ij,kji->...k", g, PAULI))
        if np.any(a + 1.0 <= tol):
            raise OutOfInjectivityRadius("SU(2) logarithm undefined at -I")
        s = np.linalg.norm(v, axis=-1)
        half = np.arctan2(s, a)
        with np.errstate(invalid="ignore", divide="ignore"):
            factor = np.where(s > 1e-15, 2.0 * half / np.where(s > 0, s, 1.0), 2.0)
        return factor[..., None] * v

    def inv(self, g):
        return np.conj(np.swapaxes(g, -1, -2))

    def membership_residual(self, g):
        g = np.asarray(g)
        eye = np.eye(2)
        unitarity = np.linalg.norm(self.inv(g) @ g - eye, axis=(-2, -1))
        det = np.abs(np.linalg.det(g) - 1.0)
        return np.maximum(unitarity, det)

    def Ad_matrix(self, g):
        return covering_project(g)

    def lift_adjoint(self, A):
        return covering_lift(A)

    def center_of(self, g, tol=TAU_CENTER):
        g = np.asarray(g)
        eye = np.eye(2)
        if np.linalg.norm(g - eye) < tol:
            return Sign(1)
        if np.linalg.norm(g + eye) < tol:
            return Sign(-1)
        dist = min(np.linalg.norm(g - eye), np.linalg.norm(g + eye))
        raise NotCentral(f"SU(2) element at distance {dist:.3e} from {{+I, -I}}")


class SO3(GroupModel):
    """SO(3) with basis ``(L_k)_ij = -eps_kij`` so that ``[L_1, L_2] = L_3``."""

    name = "SO(3)"
    dim = 3
    matrix_size = 3
    _basis = -np.array(
        [
            [[0, 0, 0], [0, 0, 1], [0, -1, 0]],
            [[0, 0, -1], [0, 0, 0], [1, 0, 0]],
            [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
        ],
        dtype=float,
    )

    @property
    def basis(self):
        return self._basis

    def vee(self, A):
        A = np.asarray(A)
        return np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)

    def exp(self, X):
        X = np.asarray(X, dtype=float)
        theta = np.linalg.norm(X, axis=-1)[..., None, None]
        K = self.hat(X)
        small = theta < 1e-8
        safe = np.where(small, 1.0, theta)
        a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
        b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
        return np.eye(3) + a * K + b * (K @ K)

    def log(self, g, tol=TAU_GROUP):
        g = np.asarray(g, dtype=float)
        cos = np.clip(0.5 * (np.trace(g, axis1=-2, axis2=-1) - 1.0), -1.0, 1.0)
        if np.any(cos + 1.0 <= tol):
            raise OutOfInjectivityRadius("SO(3) logarithm undefined at rotation angle pi")
        theta = np.arccos(cos)
        w = self.vee(g - np.swapaxes(g, -1, -2))
        sin = np.sin(theta)
        factor = np.where(theta < 1e-8, 0.5 + theta**2 / 12.0, theta / (2.0 * np.where(sin == 0, 1.0, sin)))
        return factor[..., None] * w

    def inv(self, g):
        return np.swapaxes(g, -1, -2)

    def Ad(self, g, X):
        return np.einsum("...ij,...j->...i", g, X)

    def Ad_matrix(self, g):
        return np.asarray(g, dtype=float)

    def lift_adjoint(self, A):
        return np.asarray(A, dtype=float)

    def membership_residual(self, g):
        g = np.asarray(g)
        ortho = np.linalg.norm(np.swapaxes(g, -1, -2) @ g - np.eye(3), axis=(-2, -1))
        return np.maximum(ortho, np.abs(np.linalg.det(g) - 1.0))

    def center_of(self, g, tol=TAU_CENTER):
        if np.linalg.norm(np.asarray(g) - np.eye(3)) < tol:
            return Trivial()
        raise NotCentral("SO(3) has trivial center")


REALS = RealLine()
CIRCLE = U1()
SU2_MODEL = SU2()
SO3_MODEL = SO3()


# ---------------------------------------------------------------------------
# covering SU(2) -> SO(3)


def covering_project(g):
    """Matrix of ``Ad_g`` in the b-basis: the 2-to-1 covering SU(2) -> SO(3)."""
    g = np.asarray(g, dtype=complex)
    b = SU2_MODEL.basis
    gi = np.conj(np.swapaxes(g, -1, -2))
    # column k holds vee(g b_k g^-1)
    conj = np.einsum("...ij,kjl,...lm->...kim", g, b, gi)
    return np.swapaxes(SU2_MODEL.vee(conj), -1, -2)


def covering_lift(R):
    """One of the two SU(2) preimages of a rotation matrix (the other is its negative).

    Uses Shepperd's quaternion extraction, stable for every rotation angle.
    """
    R = np.asarray(R, dtype=float)
    tr = np.trace(R)
    diag = np.diag(R)
    k = int(np.argmax([tr, *diag]))
    if k == 0:
        w = 0.5 * np.sqrt(max(1.0 + tr, 0.0))
        v = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]) / (4.0 * w)
    else:
        i = k - 1
        j, l = (i + 1) % 3, (i + 2) % 3
        vi = 0.5 * np.sqrt(max(1.0 + 2.0 * R[i, i] - tr, 0.0))
        w = (R[l, j] - R[j, l]) / (4.0 * vi)
        v = np.empty(3)
        v[i] = vi
        v[j] = (R[j, i] + R[i, j]) / (4.0 * vi)
        v[l] = (R[l, i] + R[i, l]) / (4.0 * vi)
    # rotation by angle a about n lifts to cos(a/2) I - i sin(a/2) n.sigma
    return w * np.eye(2, dtype=complex) - 1j * np.einsum("k,kij->ij", v, PAULI)


def identify_center(model, g, tol=TAU_CENTER):
    """Encode a central group element as a :class:`CenterElement`.

    Raises :class:`NotCentral` when ``g`` is farther than ``tol`` from every
    central element.
    """
    return model.center_of(g, tol)

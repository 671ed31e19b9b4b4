"""Ordered Cech cochains with central coefficients on the tetrahedral cover.

Cochain entries are callables from sphere points to :class:`CenterElement`
values; the group law of the coefficients (addition for reals, product for
signs) is the one carried by :class:`CenterElement`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .geometry import TetraCover
from .lie_core import CenterElement, Real

__all__ = [
    "OrderedCochain1",
    "OrderedCochain2",
    "VertexOutsideOverlap",
    "coboundary",
    "is_cocycle",
    "fundamental_pairing",
    "constant_cochain1",
]


class VertexOutsideOverlap(ValueError):
    """A tetrahedron vertex is missing from a triple overlap used by the pairing."""


@dataclass
class OrderedCochain1:
    values: Mapping[tuple, Callable]
    cover: TetraCover = field(default_factory=TetraCover)

    def __call__(self, pair, x):
        return self.values[tuple(pair)](x)


@dataclass
class OrderedCochain2:
    values: Mapping[tuple, Callable]
    cover: TetraCover = field(default_factory=TetraCover)

    def __call__(self, triple, x):
        return self.values[tuple(triple)](x)

    def __mul__(self, other):
        keys = set(self.values) & set(other.values)
        vals = {k: _product(self.values[k], other.values[k]) for k in keys}
        return OrderedCochain2(vals, self.cover)

    def local_constancy_residual(self, n=20, seed=0, distance=None):
        """Largest spread of each entry over ``n`` random points of its overlap."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for triple, fn in sorted(self.values.items()):
            pts = self.cover.random_points(triple, n, rng)
            vals = [fn(x) for x in pts]
            ref = vals[0]
            for v in vals[1:]:
                worst = max(worst, _distance(v * ref.inverse()) if distance is None else distance(v, ref))
        return worst


def _product(f, g):
    return lambda x: f(x) * g(x)


def _distance(c: CenterElement):
    """Distance of a center element from the identity."""
    if isinstance(c, Real):
        return abs(c.value)
    return 0.0 if c.is_identity() else 1.0


def constant_cochain1(value: CenterElement, cover=None, pairs=None):
    cover = TetraCover() if cover is None else cover
    pairs = cover.nonempty(1) if pairs is None else pairs
    return OrderedCochain1({p: (lambda x, v=value: v) for p in pairs}, cover)


def coboundary(psi: OrderedCochain1) -> OrderedCochain2:
    """``(delta psi)_{ijk} = psi_{jk} psi_{ik}^{-1} psi_{ij}`` (additively ``psi_jk - psi_ik + psi_ij``)."""
    vals = {}
    for i, j, k in psi.cover.nonempty(2):
        a, b, c = psi.values[(j, k)], psi.values[(i, k)], psi.values[(i, j)]
        vals[(i, j, k)] = lambda x, a=a, b=b, c=c: a(x) * b(x).inverse() * c(x)
    return OrderedCochain2(vals, psi.cover)


def is_cocycle(phi: OrderedCochain2, tol=1e-8, n=20, seed=0):
    """Check ``delta phi = 0`` on every nonempty quadruple overlap.

    Returns ``(ok, residual)`` where the residual is the largest distance of
    ``phi_jkl phi_ikl^{-1} phi_ijl phi_ijk^{-1}`` from the identity over ``n``
    sample points per overlap.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i, j, k, l in phi.cover.nonempty(3):
        pts = phi.cover.random_points((i, j, k, l), n, rng)
        for x in pts:
            v = phi((j, k, l), x) * phi((i, k, l), x).inverse() * phi((i, j, l), x) * phi((i, j, k), x).inverse()
            worst = max(worst, _distance(v))
    return worst < tol, worst


def fundamental_pairing(phi: OrderedCochain2) -> CenterElement:
    """Value of the class of ``phi`` on the fundamental class of the sphere.

    ``phi_012(e_3) phi_013(e_2)^{-1} phi_023(e_1) phi_123(e_0)^{-1}``; in additive
    notation the alternating sum of the vertex evaluations.
    """
    cover = phi.cover
    V = cover.vertices
    out = None
    for (triple, vertex), sign in zip(
        [((0, 1, 2), 3), ((0, 1, 3), 2), ((0, 2, 3), 1), ((1, 2, 3), 0)], (1, -1, 1, -1)
    ):
        if not bool(cover.contains_all(triple, V[vertex])):
            raise VertexOutsideOverlap(f"vertex e_{vertex} is not in U_{''.join(map(str, triple))}")
        val = phi(triple, V[vertex])
        if sign < 0:
            val = val.inverse()
        out = val if out is None else out * val
    return out

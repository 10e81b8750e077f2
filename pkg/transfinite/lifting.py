"""
Transfinite lifting built on barycentric coordinates.

For a field F of the coordinates, each vertex i contributes two edge
projections and one vertex projection:

  onto edge i   (x_i -> x_{i+1}):  mu_i = 1 - l_{i+1}, mu_{i+1} = l_{i+1}
  onto edge i-1 (x_{i-1} -> x_i):  mu_{i-1} = l_{i-1}, mu_i = 1 - l_{i-1}
  onto vertex i:                   the i-th unit vector

and  L[F](l) = sum_i l_i [F(edge i) + F(edge i-1) - F(vertex i)].
L[F] agrees with F on the boundary, so F - L[F] vanishes there.
"""

from typing import Callable

import numpy as np

from autodiff import backend
from autodiff.jet import Jet2
from geometry.polygon import Polygon
from transfinite.boundary import BoundarySpec


def _stack(items: list, axis: int):
    if any(isinstance(i, Jet2) for i in items):
        return Jet2.stack(items, axis=axis)
    shape = max((backend.shape_of(i) for i in items), key=len)
    return backend.stack([backend.broadcast_to(i, shape, like=i) for i in items], axis=axis)


def _mul(a, b):
    # keep the jet on the left so tensors never see a Jet2 operand
    return b * a if isinstance(b, Jet2) and not isinstance(a, Jet2) else a * b


def edge_projections(lam):
    """
    The 2n edge-projected coordinate vectors of every point.

    Parameters:
    - lam: coordinates (..., n), plain or jet.

    Returns:
    - projections (..., 2n, n); row 2i projects onto edge i and row 2i+1
      onto edge i-1, both for vertex i.
    """
    n = lam.shape[-1]
    zero = lam[..., 0] * 0.0
    rows = []
    for i in range(n):
        nxt, prv = (i + 1) % n, (i - 1) % n
        on_edge = [zero] * n
        on_edge[i] = 1.0 - lam[..., nxt]
        on_edge[nxt] = lam[..., nxt]
        rows.append(_stack(on_edge, axis=-1))
        on_prev = [zero] * n
        on_prev[prv] = lam[..., prv]
        on_prev[i] = 1.0 - lam[..., prv]
        rows.append(_stack(on_prev, axis=-1))
    return _stack(rows, axis=-2)


def vertex_projections(n: int) -> np.ndarray:
    return np.eye(n)


def combine(lam, f_edge, f_vertex):
    """
    sum_i l_i [f_edge[2i] + f_edge[2i+1] - f_vertex[i]].

    f_edge has shape (..., 2n); f_vertex is (n,) or broadcastable to (..., n).
    """
    blend = f_edge[..., 0::2] + f_edge[..., 1::2] - f_vertex
    terms = _mul(lam, blend)
    if isinstance(terms, Jet2):
        return terms.sum(axis=-1)
    return backend.reduce_sum(terms, -1)


def lift_field(poly: Polygon, field: Callable, lam):
    """
    Apply the lifting operator to a field of the coordinates.

    Parameters:
    - poly (Polygon): the domain (fixes n).
    - field (callable): maps coordinate vectors (..., n) to values (...).
    - lam: coordinates (..., n), plain or jet.

    Returns:
    - L[field] at lam, in the algebra of lam.
    """
    if lam.shape[-1] != poly.n:
        raise ValueError(f"expected {poly.n} coordinates, got {lam.shape[-1]}")
    f_edge = field(edge_projections(lam))
    f_vertex = field(vertex_projections(poly.n))
    return combine(lam, f_edge, f_vertex)


def lift_g(poly: Polygon, spec: BoundarySpec, lam):
    """
    Transfinite interpolant of the boundary data:

        g = sum_i l_i [alpha_i(l_{i+1}) + alpha_{i-1}(1 - l_{i-1}) - alpha_i(0)]

    Equals the prescribed data on the boundary.

    Raises:
    - NonFiniteResult: from the edge expressions.
    """
    n = poly.n
    if spec.homogeneous:
        return lam[..., 0] * 0.0
    total = 0.0
    for i in range(n):
        li = lam[..., i]
        bracket = (
            spec.alpha(i, lam[..., (i + 1) % n])
            + spec.alpha(i - 1, 1.0 - lam[..., (i - 1) % n])
            - float(spec.alpha(i, 0.0))
        )
        total = total + _mul(li, bracket)
    return total

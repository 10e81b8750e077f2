from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from barycentric.coords_interface import values_of
from expr.evaluator import evaluate
from expr.nodes import Expr, Number, free_variables, to_source
from expr.parser import parse
from geometry.polygon import Polygon


class BoundarySpecError(ValueError):
    pass


@dataclass(frozen=True)
class MatchingReport:
    """
    Corner mismatches of piecewise boundary data.

    mismatches[j] = |alpha_{j-1}(1) - alpha_j(0)|, measured at vertex j
    (0-based), where edges j-1 and j meet.
    """

    mismatches: np.ndarray
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.all(self.mismatches <= self.tol))

    @property
    def worst_vertex(self) -> int:
        return int(np.argmax(self.mismatches))

    def __str__(self) -> str:
        status = "ok" if self.ok else f"mismatch {self.mismatches.max():.3g} at vertex {self.worst_vertex}"
        return f"MatchingReport({status}, tol={self.tol:g})"


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    """
    Dirichlet data given edge by edge.

    Edge i runs from x_i to x_{i+1}. Its expression may use the Cartesian
    coordinates x, y of the boundary point and the edge parameter t in
    [0, 1]; alpha_i(s) is the expression at the point (1-s) x_i + s x_{i+1}
    with t = s. On edge i the parameter equals lambda_{i+1}.
    """

    poly: Polygon
    edges: tuple[Expr, ...]
    homogeneous: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_strings(cls, poly: Polygon, sources: list[str], extra: dict | None = None) -> BoundarySpec:
        if len(sources) != poly.n:
            raise BoundarySpecError(f"expected {poly.n} edge expressions, got {len(sources)}")
        edges = tuple(parse(str(s)) for s in sources)
        allowed = {"x", "y", "t"} | set(extra or {})
        for i, e in enumerate(edges):
            unknown = free_variables(e) - allowed
            if unknown:
                raise BoundarySpecError(f"edge {i} uses unbound variables {sorted(unknown)}")
        return cls(poly, edges, False, dict(extra or {}))

    @classmethod
    def homogeneous_spec(cls, poly: Polygon) -> BoundarySpec:
        return cls(poly, tuple(Number(0.0) for _ in range(poly.n)), True)

    @classmethod
    def constant(cls, poly: Polygon, c: float) -> BoundarySpec:
        return cls(poly, tuple(Number(float(c)) for _ in range(poly.n)), False)

    @property
    def n(self) -> int:
        return self.poly.n

    def sources(self) -> list[str]:
        return [to_source(e) for e in self.edges]

    def alpha(self, i: int, s):
        """Boundary value on edge i at parameter s (float, array or jet)."""
        i %= self.n
        x, y = self.poly.edge_point(i, s)
        return evaluate(self.edges[i], {"x": x, "y": y, "t": s, **self.extra})

    def value_at(self, points: np.ndarray, edge_index: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Prescribed B at boundary points given their edge and edge parameter."""
        out = np.empty(len(points))
        for i in range(self.n):
            sel = edge_index == i
            if np.any(sel):
                out[sel] = values_of(self.alpha(i, np.asarray(t[sel], dtype=float))) * np.ones(sel.sum())
        return out


def check_matching(spec: BoundarySpec, tol: float = 1e-10) -> MatchingReport:
    """
    Compare the two edge expressions meeting at every vertex.

    Returns:
    - MatchingReport: n mismatch magnitudes; ok iff all are <= tol.
    """
    n = spec.n
    mismatches = np.array(
        [abs(float(spec.alpha(j - 1, 1.0)) - float(spec.alpha(j, 0.0))) for j in range(n)]
    )
    report = MatchingReport(mismatches, tol)
    if not report.ok:
        logger.warning(f"boundary data does not match at the corners: {report}")
    return report

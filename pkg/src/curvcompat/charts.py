"""Coordinate charts and fields with jet-evaluable component functions.

A chart or field wraps a plain Python callable that maps a list of
coordinates to components.  The same callable is evaluated on floats (to get
point values) and on ``Jet`` coordinates (to get derivatives), so component
functions should be written with the helpers in :mod:`curvcompat.jets`
(``sin``, ``exp``, ...) or with arithmetic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "MetricChart",
    "Sym2Field",
    "VectorField",
    "ScalarField",
    "polynomial_sym2_field",
]


@dataclass(eq=False)
class MetricChart:
    """Metric components over a coordinate chart.

    ``components(xs)`` must return an n x n nested sequence (symmetric entry
    by entry) evaluable on jets to order 4; ``signature`` declares the
    expected eigenvalue signs, validated wherever a Metric is assembled.
    """

    n: int
    components: Callable
    signature: tuple
    name: str = ""

    def matrix_at(self, point) -> np.ndarray:
        point = [float(x) for x in point]
        raw = self.components(point)
        g = np.empty((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                g[i, j] = float(raw[i][j])
        return 0.5 * (g + g.T)

    def metric_at(self, point):
        from .tensors import Metric

        m = Metric(self.matrix_at(point))
        if m.signature != tuple(sorted(self.signature)):
            raise ValueError(
                f"chart {self.name!r}: signature {m.signature} at {tuple(point)} "
                f"does not match declared {tuple(sorted(self.signature))}"
            )
        return m


@dataclass(eq=False)
class Sym2Field:
    """Symmetric rank-2 field; components evaluable on jets to order 2."""

    n: int
    components: Callable
    name: str = ""

    def value_at(self, point) -> np.ndarray:
        point = [float(x) for x in point]
        raw = self.components(point)
        b = np.empty((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                b[i, j] = float(raw[i][j])
        return 0.5 * (b + b.T)


@dataclass(eq=False)
class VectorField:
    """One-form field (covariant components), evaluable on jets."""

    n: int
    components: Callable
    name: str = ""

    def value_at(self, point) -> np.ndarray:
        point = [float(x) for x in point]
        raw = self.components(point)
        return np.array([float(raw[i]) for i in range(self.n)])


@dataclass(eq=False)
class ScalarField:
    """Scalar field, evaluable on jets."""

    components: Callable
    name: str = ""

    def value_at(self, point) -> float:
        return float(self.components([float(x) for x in point]))


def polynomial_sym2_field(n: int, seed: int, degree: int = 2, scale: float = 0.5) -> Sym2Field:
    """Seeded random symmetric polynomial field of the given total degree."""
    rng = np.random.default_rng(seed)
    c0 = rng.uniform(-scale, scale, size=(n, n))
    c0 = 0.5 * (c0 + c0.T)
    c1 = c2 = None
    if degree >= 1:
        c1 = rng.uniform(-scale, scale, size=(n, n, n))
        c1 = 0.5 * (c1 + c1.transpose(1, 0, 2))
    if degree >= 2:
        c2 = rng.uniform(-scale, scale, size=(n, n, n, n))
        c2 = 0.5 * (c2 + c2.transpose(1, 0, 2, 3))
    if degree > 2:
        raise ValueError("degrees above 2 are not needed here")

    def comps(xs):
        out = [[c0[i, j] for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                e = out[i][j]
                if c1 is not None:
                    for k in range(n):
                        e = e + c1[i, j, k] * xs[k]
                if c2 is not None:
                    for k in range(n):
                        for l in range(k, n):
                            w = c2[i, j, k, l] + (c2[i, j, l, k] if l != k else 0.0)
                            e = e + w * xs[k] * xs[l]
                out[i][j] = e
        return out

    return Sym2Field(n, comps, name=f"poly-sym2(seed={seed})")

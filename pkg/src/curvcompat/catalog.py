"""Closed-form metric fixtures with probe points and reference values.

Each fixture bundles a chart, a list of probe points chosen away from
coordinate singularities (horizons, poles, zeros of scale factors), any
distinguished fields, and a map of expected reference values, each tagged
with its provenance ("closed-form" for hand-derivable values,
"construction" for values true by construction of the fixture, and
"literature" for classical facts about the metric).

Fixture ids and parameters:

    euclidean(n)                     flat, all-plus signature
    minkowski(n)                     flat, one minus sign
    sphere(n in {2,3}, r)            round sphere of radius r
    constant_curvature(n, k_scal)    conformally flat space form; optional
                                     lorentzian=True for the indefinite model
    robertson_walker(a in {t2,exp})  -dt^2 + a(t)^2 (flat 3-slice), with the
                                     distinguished expanding one-form
    warped(warp, spatial)            -dt^2 + f(t)^2 g*(x); spatial factor
                                     "constant_curvature" or "generic"
    goedel(omega)                    rotating homogeneous spacetime, with its
                                     rotating congruence
    schwarzschild(M)                 static vacuum; probes off the horizon,
                                     with the static unit observer
    twisted(eps)                     -dt^2 + f(t,x)^2 (flat 3-slice) with
                                     f = 1 + eps*t*x and its torqued one-form
    perturbed_flat(n, seed, eps)     identity + seeded polynomial perturbation
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import jets as jm
from .charts import MetricChart, ScalarField, Sym2Field, VectorField

__all__ = ["Fixture", "get_fixture", "list_fixtures"]


@dataclass(frozen=True)
class Fixture:
    id: str
    label: str
    chart: MetricChart
    probe_points: tuple
    special_fields: dict = dc_field(default_factory=dict)
    expected: dict = dc_field(default_factory=dict)  # name -> (value, provenance)

    def __post_init__(self):
        for p in self.probe_points:
            self.chart.metric_at(p)  # raises on singular/ill-signed probes


def _diag_chart(n, diag_fn, signature, name):
    def comps(xs):
        d = diag_fn(xs)
        return [[d[i] if i == j else 0.0 for j in range(n)] for i in range(n)]

    return MetricChart(n, comps, signature, name=name)


def _euclidean(n=4):
    n = int(n)
    chart = _diag_chart(n, lambda xs: [1.0] * n, (1,) * n, f"euclidean{n}")
    probes = (tuple(0.1 * (i + 1) for i in range(n)),)
    return Fixture(
        "euclidean",
        f"euclidean(n={n})",
        chart,
        probes,
        expected={"scalar_curvature": (0.0, "closed-form")},
    )


def _minkowski(n=4):
    n = int(n)
    sig = (-1,) + (1,) * (n - 1)

    def comps(xs):
        return [[(-1.0 if i == 0 else 1.0) if i == j else 0.0 for j in range(n)] for i in range(n)]

    chart = MetricChart(n, comps, sig, name=f"minkowski{n}")
    probes = (tuple(0.1 * (i + 1) for i in range(n)),)
    return Fixture(
        "minkowski",
        f"minkowski(n={n})",
        chart,
        probes,
        expected={"scalar_curvature": (0.0, "closed-form")},
    )


def _sphere(n=2, r=1.0):
    n = int(n)
    r = float(r)
    if n not in (2, 3):
        raise ValueError("sphere fixture supports n in {2, 3}")
    if r <= 0:
        raise ValueError("radius must be positive")
    if n == 2:

        def comps(xs):
            th = xs[0]
            s = jm.sin(th)
            return [[r * r, 0.0], [0.0, r * r * s * s]]

        probes = ((0.9, 0.4), (1.9, 2.1))
    else:

        def comps(xs):
            chi, th = xs[0], xs[1]
            sc = jm.sin(chi)
            st = jm.sin(th)
            return [
                [r * r, 0.0, 0.0],
                [0.0, r * r * sc * sc, 0.0],
                [0.0, 0.0, r * r * sc * sc * st * st],
            ]

        probes = ((1.0, 0.9, 0.4), (1.7, 2.0, 1.2))
    chart = MetricChart(n, comps, (1,) * n, name=f"sphere{n}(r={r:g})")
    return Fixture(
        "sphere",
        f"sphere(n={n},r={r:g})",
        chart,
        probes,
        expected={"scalar_curvature": (n * (n - 1) / r**2, "closed-form")},
    )


def _constant_curvature(n=4, k_scal=1.2, lorentzian=False):
    """Conformally flat space form: g = eta / (1 + (k/4) q(x))^2.

    q is the flat quadratic form of the chosen signature and
    k = k_scal / (n(n-1)) is the sectional curvature.
    """
    n = int(n)
    k_scal = float(k_scal)
    k = k_scal / (n * (n - 1))
    eta = [-1.0 if (lorentzian and i == 0) else 1.0 for i in range(n)]

    def comps(xs):
        q = sum(eta[i] * xs[i] * xs[i] for i in range(n))
        w = 1.0 + 0.25 * k * q
        f = w ** (-2)
        return [[f * eta[i] if i == j else 0.0 for j in range(n)] for i in range(n)]

    sig = tuple(int(e) for e in eta)
    chart = MetricChart(n, comps, sig, name=f"constcurv{n}(k={k_scal:g})")
    probes = (
        tuple(0.05 * (i + 1) for i in range(n)),
        tuple(-0.04 * (i + 1) for i in range(n)),
    )
    return Fixture(
        "constant_curvature",
        f"constant_curvature(n={n},k_scal={k_scal:g})",
        chart,
        probes,
        expected={
            "scalar_curvature": (k_scal, "closed-form"),
            "constant_curvature": (True, "construction"),
        },
    )


_SCALE_FACTORS = {
    "t2": (lambda t: t * t, lambda t: 2.0 * t),
    "exp": (jm.exp, jm.exp),
}


def _robertson_walker(a="t2"):
    if a not in _SCALE_FACTORS:
        raise ValueError(f"unknown scale factor {a!r}; use one of {sorted(_SCALE_FACTORS)}")
    fa, dfa = _SCALE_FACTORS[a]
    n = 4

    def comps(xs):
        s = fa(xs[0])
        s2 = s * s
        return [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, s2, 0.0, 0.0],
            [0.0, 0.0, s2, 0.0],
            [0.0, 0.0, 0.0, s2],
        ]

    chart = MetricChart(n, comps, (-1, 1, 1, 1), name=f"rw({a})")
    # expanding one-form: a(t) d t lowered against g_tt = -1
    X = VectorField(n, lambda xs: [-fa(xs[0]), 0.0, 0.0, 0.0], name="expanding")
    probes = ((1.0, 0.2, 0.3, -0.1), (1.4, -0.2, 0.1, 0.25))
    rho = {"t2": [2.0 * p[0] for p in probes], "exp": [math.exp(p[0]) for p in probes]}[a]
    return Fixture(
        "robertson_walker",
        f"robertson_walker(a={a})",
        chart,
        probes,
        special_fields={"expanding": X},
        expected={
            "weyl_zero": (True, "closed-form"),
            "expanding_class": ("concircular", "closed-form"),
            "expanding_rho": (tuple(rho), "closed-form"),
        },
    )


def _spatial_factor(kind):
    """3-metric factors for the warped fixture, as functions of xs[1:4]."""
    if kind == "constant_curvature":
        # sectional curvature 1/6 gives the space form scalar curvature 1
        def f3(xs):
            x, y, z = xs[1], xs[2], xs[3]
            w = 1.0 + 0.25 * (1.0 / 6.0) * (x * x + y * y + z * z)
            f = w ** (-2)
            return [[f, 0.0, 0.0], [0.0, f, 0.0], [0.0, 0.0, f]]

        return f3
    if kind == "generic":

        def f3(xs):
            x, y = xs[1], xs[2]
            return [
                [1.0, 0.0, 0.0],
                [0.0, 1.0 + x * x, 0.0],
                [0.0, 0.0, 1.0 + y * y],
            ]

        return f3
    raise ValueError(f"unknown spatial factor {kind!r}")


def _warped(warp="exp", spatial="constant_curvature"):
    if warp not in _SCALE_FACTORS:
        raise ValueError(f"unknown warp {warp!r}; use one of {sorted(_SCALE_FACTORS)}")
    fw, _ = _SCALE_FACTORS[warp]
    f3 = _spatial_factor(spatial)
    n = 4

    def comps(xs):
        f = fw(xs[0])
        f2 = f * f
        gs = f3(xs)
        out = [[0.0] * 4 for _ in range(4)]
        out[0][0] = -1.0
        for i in range(3):
            for j in range(3):
                out[i + 1][j + 1] = f2 * gs[i][j]
        return out

    chart = MetricChart(n, comps, (-1, 1, 1, 1), name=f"warped({warp},{spatial})")
    probes = ((0.3, 0.25, -0.2, 0.15), (0.5, -0.1, 0.3, 0.2))
    return Fixture(
        "warped",
        f"warped(warp={warp},spatial={spatial})",
        chart,
        probes,
        expected={
            "spatial_factor": (spatial, "construction"),
            "ricci_riemann_compatible": (spatial == "constant_curvature", "literature"),
        },
    )


def _goedel(omega=1.0):
    omega = float(omega)
    if omega <= 0:
        raise ValueError("omega must be positive")
    a2 = 1.0 / (2.0 * omega * omega)
    a = math.sqrt(a2)
    n = 4

    def comps(xs):
        ex = jm.exp(xs[1])
        e2x = jm.exp(2.0 * xs[1])
        return [
            [-a2, 0.0, 0.0, -a2 * ex],
            [0.0, a2, 0.0, 0.0],
            [0.0, 0.0, a2, 0.0],
            [-a2 * ex, 0.0, 0.0, -a2 * e2x / 2.0],
        ]

    chart = MetricChart(n, comps, (-1, 1, 1, 1), name=f"goedel(w={omega:g})")
    # rotating congruence: (1/a) d_t lowered
    u = VectorField(n, lambda xs: [-a, 0.0, 0.0, -a * jm.exp(xs[1])], name="rotating")
    probes = ((0.0, 0.2, 0.1, -0.3), (0.4, -0.25, 0.3, 0.1))
    return Fixture(
        "goedel",
        f"goedel(omega={omega:g})",
        chart,
        probes,
        special_fields={"rotating": u},
        expected={"ricci_weyl_compatible": (True, "literature")},
    )


def _schwarzschild(M=1.0):
    M = float(M)
    if M <= 0:
        raise ValueError("M must be positive")
    n = 4

    def comps(xs):
        r, th = xs[1], xs[2]
        h = 1.0 - 2.0 * M / r
        s = jm.sin(th)
        return [
            [-h, 0.0, 0.0, 0.0],
            [0.0, 1.0 / h, 0.0, 0.0],
            [0.0, 0.0, r * r, 0.0],
            [0.0, 0.0, 0.0, r * r * s * s],
        ]

    chart = MetricChart(n, comps, (-1, 1, 1, 1), name=f"schwarzschild(M={M:g})")
    u = VectorField(
        n,
        lambda xs: [-jm.sqrt(1.0 - 2.0 * M / xs[1]), 0.0, 0.0, 0.0],
        name="static-observer",
    )
    probes = ((0.0, 3.0 * M, 1.0, 0.5), (0.0, 4.5 * M, 2.0, 1.3))
    return Fixture(
        "schwarzschild",
        f"schwarzschild(M={M:g})",
        chart,
        probes,
        special_fields={"static_observer": u},
        expected={
            "ricci_zero": (True, "closed-form"),
            "constant_curvature": (False, "closed-form"),
            "purely_electric": (True, "literature"),
        },
    )


def _twisted(eps=0.3):
    eps = float(eps)
    n = 4

    def warp(xs):
        return 1.0 + eps * xs[0] * xs[1]

    def comps(xs):
        f = warp(xs)
        f2 = f * f
        return [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, f2, 0.0, 0.0],
            [0.0, 0.0, f2, 0.0],
            [0.0, 0.0, 0.0, f2],
        ]

    chart = MetricChart(n, comps, (-1, 1, 1, 1), name=f"twisted(eps={eps:g})")
    tau = VectorField(n, lambda xs: [-warp(xs), 0.0, 0.0, 0.0], name="torqued-candidate")
    probes = ((0.3, 0.4, 0.1, -0.2), (0.5, -0.3, 0.2, 0.1))
    return Fixture(
        "twisted",
        f"twisted(eps={eps:g})",
        chart,
        probes,
        special_fields={"torqued": tau},
        expected={"torqued_class": ("torqued", "construction")},
    )


def _perturbed_flat(n=4, seed=7, eps=0.05):
    n = int(n)
    seed = int(seed)
    eps = float(eps)
    rng = np.random.default_rng(seed)
    c1 = rng.uniform(-1, 1, size=(n, n, n))
    c2 = rng.uniform(-1, 1, size=(n, n, n, n))
    c3 = rng.uniform(-1, 1, size=(n, n, n))
    c4 = rng.uniform(-1, 1, size=(n, n, n))
    c1 = 0.5 * (c1 + c1.transpose(1, 0, 2))
    c2 = 0.5 * (c2 + c2.transpose(1, 0, 2, 3))
    c3 = 0.5 * (c3 + c3.transpose(1, 0, 2))
    c4 = 0.5 * (c4 + c4.transpose(1, 0, 2))

    def comps(xs):
        out = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                p = 0.0
                for k in range(n):
                    xk = xs[k]
                    p = p + c1[i, j, k] * xk + c3[i, j, k] * xk * xk * xk + c4[i, j, k] * xk * xk * xk * xk
                    for l in range(n):
                        p = p + c2[i, j, k, l] * xk * xs[l]
                out[i][j] = out[i][j] + eps * p
        return out

    chart = MetricChart(n, comps, (1,) * n, name=f"pflat{n}(seed={seed})")
    probes = (
        tuple(0.08 * ((i % 3) + 1) for i in range(n)),
        tuple(-0.06 * ((i % 4) + 1) for i in range(n)),
    )
    return Fixture(
        "perturbed_flat",
        f"perturbed_flat(n={n},seed={seed},eps={eps:g})",
        chart,
        probes,
    )


_BUILDERS = {
    "euclidean": _euclidean,
    "minkowski": _minkowski,
    "sphere": _sphere,
    "constant_curvature": _constant_curvature,
    "robertson_walker": _robertson_walker,
    "warped": _warped,
    "goedel": _goedel,
    "schwarzschild": _schwarzschild,
    "twisted": _twisted,
    "perturbed_flat": _perturbed_flat,
}


def list_fixtures():
    """Known fixture ids, sorted."""
    return sorted(_BUILDERS)


def get_fixture(fixture_id: str, **params) -> Fixture:
    """Build a fixture by id; deterministic in its parameters.

    Raises KeyError for unknown ids and ValueError for invalid parameters
    (including probe points where the chart degenerates).
    """
    try:
        builder = _BUILDERS[fixture_id]
    except KeyError:
        raise KeyError(
            f"unknown fixture {fixture_id!r}; known ids: {', '.join(list_fixtures())}"
        ) from None
    return builder(**params)

"""Differential geometry over coordinate charts via truncated Taylor jets.

Everything is evaluated pointwise: a :class:`ChartFrame` seeds order-4 jets at
a probe point, assembles the metric, connection and curvature as jet arrays,
and exposes covariant differentiation of arbitrary covariant jet tensors.
Point values of identities that involve up to four metric derivatives come
out exact to rounding.

Index conventions (documented once, used everywhere):

* connection coefficients are stored as ``gamma[m, i, j]`` (upper index
  first);
* the mixed curvature is ``riem31[j, k, l, m]`` meaning R_{jkl}^m, assembled
  as -d_j G^m_kl + d_k G^m_jl - G^d_kl G^m_jd + G^d_jl G^m_kd, which makes
  the curvature of the unit 2-sphere positive;
* the fully covariant curvature lowers the last slot; its contraction on the
  second and fourth slots is the Ricci tensor;
* covariant derivatives prepend the derivative index: ``(grad T)[a, ...]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .charts import MetricChart, ScalarField, Sym2Field, VectorField
from .jets import Jet, jet_space
from .tensors import DEFAULT_TOLERANCE, GCT, Metric, cyclic3, fro

__all__ = [
    "ChartFrame",
    "CurvaturePack",
    "IdentityReport",
    "VectorClassification",
    "GeodesicMapResult",
    "frame",
    "christoffel",
    "riemann",
    "ricci_scalar",
    "weyl",
    "schouten",
    "projective",
    "curvature_pack",
    "cov_deriv_sym2",
    "second_cov_deriv_sym2",
    "cov_deriv_oneform",
    "codazzi_deviation",
    "ricci_identity_defect",
    "identity_defect",
    "weyl_divergence_defect",
    "IDENTITY_KINDS",
    "classify_vector_field",
    "electric_weyl",
    "weyl_from_electric",
    "mixed_compat_sum",
    "geodesic_transform",
    "conformal_transform",
    "projective_of_mixed",
    "codazzi_candidate_from_potential",
]

_FLOOR = DEFAULT_TOLERANCE.floor


class ChartFrame:
    """Jet tower of one chart at one probe point.

    Curvature pieces are built lazily and cached; the frame itself is cached
    per (chart, point, order) by :func:`frame`.  The default order 4 covers
    every identity here (two covariant derivatives of curvature).
    """

    def __init__(self, chart: MetricChart, point, order: int = 4):
        self.chart = chart
        self.point = tuple(float(x) for x in point)
        self.n = chart.n
        self.space = jet_space(chart.n, order)
        self.g_jets = self._eval_matrix(chart.components, symmetric=True)
        g0 = self.space.value(self.g_jets)
        if abs(float(np.linalg.det(g0))) < 1e-12:
            raise ValueError(f"chart {chart.name!r} is singular at {self.point}")
        self.metric = Metric(g0)
        if chart.signature and self.metric.signature != tuple(sorted(chart.signature)):
            raise ValueError(
                f"chart {chart.name!r}: signature {self.metric.signature} at "
                f"{self.point} does not match declared {tuple(sorted(chart.signature))}"
            )

    # ---- evaluation of component functions ------------------------------

    def _coeffs(self, entry):
        if isinstance(entry, Jet):
            if entry.space is not self.space:
                raise ValueError("field evaluated on a foreign jet space")
            return entry.c
        c = np.zeros(self.space.ncoeff)
        c[0] = float(entry)
        return c

    def _eval_matrix(self, fn, symmetric=False):
        xs = self.space.variables(self.point)
        raw = fn(xs)
        n = self.n
        out = np.empty((n, n, self.space.ncoeff))
        for i in range(n):
            for j in range(n):
                out[i, j] = self._coeffs(raw[i][j])
        if symmetric:
            asym = float(np.abs(out - out.transpose(1, 0, 2)).max())
            if asym > 1e-10 * max(float(np.abs(out).max()), _FLOOR):
                raise ValueError("component functions are not symmetric")
            out = 0.5 * (out + out.transpose(1, 0, 2))
        return out

    def eval_sym2(self, field: Sym2Field):
        if field.n != self.n:
            raise ValueError("field dimension does not match the chart")
        return self._eval_matrix(field.components, symmetric=True)

    def eval_oneform(self, field: VectorField):
        if field.n != self.n:
            raise ValueError("field dimension does not match the chart")
        xs = self.space.variables(self.point)
        raw = field.components(xs)
        out = np.empty((self.n, self.space.ncoeff))
        for i in range(self.n):
            out[i] = self._coeffs(raw[i])
        return out

    def eval_scalar(self, field: ScalarField):
        xs = self.space.variables(self.point)
        return self._coeffs(field.components(xs))

    def value(self, T):
        return self.space.value(T)

    # ---- metric, connection, curvature ----------------------------------

    @cached_property
    def ginv_jets(self):
        return self.space.matrix_inverse(self.g_jets)

    @cached_property
    def gamma_jets(self):
        """gamma[m, i, j] = G^m_ij."""
        sp = self.space
        dg = sp.grad(self.g_jets)  # dg[a, i, j] = d_a g_ij
        s = (
            dg.transpose(1, 0, 2, 3)  # [k,i,j] -> d_i g_kj
            + dg.transpose(1, 2, 0, 3)  # [k,i,j] -> d_j g_ki
            - dg
        )
        return 0.5 * sp.tensordot(self.ginv_jets, s, axes=([1], [0]))

    @cached_property
    def riem31_jets(self):
        """riem31[j, k, l, m] = R_{jkl}^m."""
        sp = self.space
        gam = self.gamma_jets
        dgam = sp.grad(gam)  # [a, m, i, j] = d_a G^m_ij
        t1 = dgam.transpose(0, 2, 3, 1, 4)  # [j,k,l,m] <- dgam[j, m, k, l]
        t2 = dgam.transpose(2, 0, 3, 1, 4)  # [j,k,l,m] <- dgam[k, m, j, l]
        q1 = sp.tensordot(gam, gam, axes=([0], [2]))  # [k,l, m,j] = G^d_kl G^m_jd
        q1 = q1.transpose(3, 0, 1, 2, 4)
        q2 = q1.transpose(1, 0, 2, 3, 4)  # swap j,k: G^d_jl G^m_kd
        return -t1 + t2 - q1 + q2

    @cached_property
    def riem04_jets(self):
        return self.space.tensordot(self.riem31_jets, self.g_jets, axes=([3], [0]))

    @cached_property
    def ricci_jets(self):
        return np.trace(self.riem31_jets, axis1=1, axis2=3)

    @cached_property
    def rscal_jets(self):
        return self.space.tensordot(self.ginv_jets, self.ricci_jets, axes=([0, 1], [0, 1]))

    @cached_property
    def schouten_jets(self):
        n = self.n
        if n < 3:
            raise ValueError("the trace-adjusted tensor needs dimension >= 3")
        sp = self.space
        trace_term = sp.mul(self.rscal_jets[None, None, :], self.g_jets) / (2.0 * (n - 1))
        return (self.ricci_jets - trace_term) / (n - 2)

    @cached_property
    def weyl04_jets(self):
        if self.n < 3:
            raise ValueError("the totally traceless part needs dimension >= 3")
        return self.riem04_jets - self._kn_jets(self.schouten_jets, self.g_jets)

    def _kn_jets(self, a, b):
        sp = self.space
        t1 = sp.mul(a[:, None, :, None, :], b[None, :, None, :, :])  # a_il b_jm
        t2 = sp.mul(b[:, None, :, None, :], a[None, :, None, :, :])  # b_il a_jm
        t3 = sp.mul(a[:, None, None, :, :], b[None, :, :, None, :])  # a_im b_jl
        t4 = sp.mul(b[:, None, None, :, :], a[None, :, :, None, :])  # b_im a_jl
        return t1 + t2 - t3 - t4

    @cached_property
    def projective31_jets(self):
        n = self.n
        eye = np.eye(n)
        ric = self.ricci_jets
        corr = (
            eye[:, None, None, :, None] * ric[None, :, :, None, :]
            - eye[None, :, None, :, None] * ric[:, None, :, None, :]
        ) / (n - 1)
        return self.riem31_jets + corr

    # ---- covariant differentiation --------------------------------------

    def cov_deriv(self, T):
        """Covariant derivative of a fully covariant jet tensor, new index first."""
        sp = self.space
        rank = T.ndim - 1
        out = sp.grad(T)
        for s in range(rank):
            c = sp.tensordot(self.gamma_jets, np.moveaxis(T, s, 0), axes=([0], [0]))
            out = out - np.moveaxis(c, 1, s + 1)
        return out

    def codazzi_jets(self, b_jets):
        d = self.cov_deriv(b_jets)
        return d - d.transpose(1, 0, 2, 3)

    @cached_property
    def div_riemann_jets(self):
        grad = self.cov_deriv(self.riem04_jets)  # [a, j, k, l, m]
        return self.space.tensordot(self.ginv_jets, grad, axes=([0, 1], [0, 4]))

    @cached_property
    def div_weyl_jets(self):
        grad = self.cov_deriv(self.weyl04_jets)
        return self.space.tensordot(self.ginv_jets, grad, axes=([0, 1], [0, 4]))

    # ---- value-level conveniences ----------------------------------------

    @cached_property
    def mixed_ricci(self):
        """Ric_i^m as a value matrix."""
        return self.value(self.ricci_jets) @ self.metric.g_inv

    def pack(self) -> "CurvaturePack":
        n = self.n
        geom_tol = DEFAULT_TOLERANCE.rel_geometry
        riem = GCT(self.value(self.riem04_jets), tol=geom_tol)
        weyl04 = schout = None
        if n >= 3:
            weyl04 = GCT(self.value(self.weyl04_jets), tol=geom_tol)
            schout = self.value(self.schouten_jets)
        return CurvaturePack(
            chart=self.chart,
            point=self.point,
            metric=self.metric,
            gamma=self.value(self.gamma_jets),
            riemann=riem,
            riemann_mixed=self.value(self.riem31_jets),
            ricci=self.value(self.ricci_jets),
            scalar=float(self.value(self.rscal_jets)),
            weyl=weyl04,
            schouten=schout,
            projective=self.value(self.projective31_jets),
        )


@lru_cache(maxsize=256)
def _frame_cached(chart, point, order):
    return ChartFrame(chart, point, order)


def frame(chart: MetricChart, point, order: int = 4) -> ChartFrame:
    """Cached ChartFrame for (chart, point, order)."""
    return _frame_cached(chart, tuple(float(x) for x in point), order)


@dataclass(frozen=True)
class CurvaturePack:
    """Point values of connection and curvature on one chart at one point."""

    chart: MetricChart
    point: tuple
    metric: Metric
    gamma: np.ndarray  # [m, i, j]
    riemann: GCT
    riemann_mixed: np.ndarray  # [j, k, l, m] = R_{jkl}^m
    ricci: np.ndarray
    scalar: float
    weyl: GCT | None
    schouten: np.ndarray | None
    projective: np.ndarray  # [j, k, l, m] mixed


def christoffel(chart, point):
    """Connection coefficients gamma[m, i, j] at a point."""
    return frame(chart, point).value(frame(chart, point).gamma_jets)


def riemann(chart, point):
    """Fully covariant curvature (as GCT) and its mixed form."""
    fr = frame(chart, point)
    return GCT(fr.value(fr.riem04_jets), tol=DEFAULT_TOLERANCE.rel_geometry), fr.value(
        fr.riem31_jets
    )


def ricci_scalar(chart, point):
    """Ricci tensor and scalar curvature at a point."""
    fr = frame(chart, point)
    ric = fr.value(fr.ricci_jets)
    return 0.5 * (ric + ric.T), float(fr.value(fr.rscal_jets))


def weyl(chart, point) -> GCT:
    """Totally traceless curvature part (identically zero in dimension 3)."""
    fr = frame(chart, point)
    if fr.n < 3:
        raise ValueError("no totally traceless part in dimension 2")
    return GCT(fr.value(fr.weyl04_jets), tol=DEFAULT_TOLERANCE.rel_geometry)


def schouten(chart, point):
    fr = frame(chart, point)
    return fr.value(fr.schouten_jets)


def projective(chart, point):
    fr = frame(chart, point)
    return fr.value(fr.projective31_jets)


def curvature_pack(chart, point) -> CurvaturePack:
    return frame(chart, point).pack()


def cov_deriv_sym2(chart, field, point):
    """(grad b)[i, j, k] = nabla_i b_jk."""
    fr = frame(chart, point)
    return fr.value(fr.cov_deriv(fr.eval_sym2(field)))


def second_cov_deriv_sym2(chart, field, point):
    """(grad grad b)[i, j, k, l] = nabla_i nabla_j b_kl."""
    fr = frame(chart, point)
    return fr.value(fr.cov_deriv(fr.cov_deriv(fr.eval_sym2(field))))


def cov_deriv_oneform(chart, field, point):
    """(grad X)[i, j] = nabla_i X_j."""
    fr = frame(chart, point)
    return fr.value(fr.cov_deriv(fr.eval_oneform(field)))


def codazzi_deviation(chart, field, point):
    """Antisymmetrized derivative nabla_j b_kl - nabla_k b_jl."""
    fr = frame(chart, point)
    return fr.value(fr.codazzi_jets(fr.eval_sym2(field)))


def ricci_identity_defect(chart, field, point) -> float:
    """Residual of [nabla_i, nabla_j] b_kl = -R_{ijl}^m b_km - R_{ijk}^m b_ml."""
    fr = frame(chart, point)
    b_jets = fr.eval_sym2(field)
    d2 = fr.value(fr.cov_deriv(fr.cov_deriv(b_jets)))
    comm = d2 - d2.transpose(1, 0, 2, 3)
    r31 = fr.value(fr.riem31_jets)
    b = fr.value(b_jets)
    rhs = -np.einsum("ijlm,km->ijkl", r31, b) - np.einsum("ijkm,ml->ijkl", r31, b)
    scale = max(fro(comm), fro(rhs), fro(b) * fro(r31), _FLOOR)
    return fro(comm - rhs) / scale


@dataclass(frozen=True)
class IdentityReport:
    kind: str
    anchor: str
    residual: float
    lhs_norm: float
    rhs_norm: float


_ANCHOR = {
    "cyclic_deviation": "Eq.(5)",
    "veblen_deviation": "Eq.(6)",
    "lovelock_riemann": "Eq.(7)",
    "lovelock_weyl": "Eq.(8)",
    "rc": "Eq.(RC)",
    "ccodd": "Eq.(CCodD)",
    "lovelock_4d": "Lovelock-4D",
    "weyl_divergence": "div-C",
}

IDENTITY_KINDS = (
    "cyclic_deviation",
    "veblen_deviation",
    "lovelock_riemann",
    "lovelock_weyl",
    "rc",
    "ccodd",
    "lovelock_4d",
)

_FIELD_KINDS = {"cyclic_deviation", "veblen_deviation", "rc", "ccodd"}


def _report(kind, lhs, rhs, extra_scale=0.0):
    ln, rn = fro(lhs), fro(rhs)
    scale = max(ln, rn, extra_scale, _FLOOR)
    return IdentityReport(kind, _ANCHOR[kind], fro(lhs - rhs) / scale, ln, rn)


def _compat_sum_values(bup, K04):
    return cyclic3(np.einsum("im,jklm->ijkl", bup, K04))


def identity_defect(kind: str, chart, point, field=None) -> IdentityReport:
    """Relative defect ||LHS - RHS|| of one differential identity at a point.

    Kinds: cyclic_deviation, veblen_deviation (need a Sym2Field), the two
    curvature-divergence identities lovelock_riemann / lovelock_weyl, the
    algebraic rc and differential ccodd relations between the traceless part
    and the full curvature (need a field), and the nine-term dimensional
    identity lovelock_4d (dimension 4 only).  These are identities: the
    defect must vanish for every chart, point and field.
    """
    if kind not in _ANCHOR or kind == "weyl_divergence":
        raise ValueError(f"unknown identity kind {kind!r}")
    if kind in _FIELD_KINDS and field is None:
        raise ValueError(f"kind {kind!r} requires a symmetric field")
    fr = frame(chart, point)
    n = fr.n
    if kind == "lovelock_4d" and n != 4:
        raise ValueError("the nine-term identity holds in dimension 4 only")
    if kind in ("lovelock_weyl", "rc", "ccodd") and n < 4:
        raise ValueError(f"kind {kind!r} needs dimension >= 4")
    sp = fr.space
    gv = fr.metric.g
    r31 = fr.value(fr.riem31_jets)
    r04 = fr.value(fr.riem04_jets)

    if kind == "cyclic_deviation":
        b_jets = fr.eval_sym2(field)
        cj = fr.codazzi_jets(b_jets)
        lhs = cyclic3(fr.value(fr.cov_deriv(cj)))
        b = fr.value(b_jets)
        rhs = -cyclic3(np.einsum("im,jklm->ijkl", b, r31))
        return _report(kind, lhs, rhs, fro(b) * fro(r31))

    if kind == "veblen_deviation":
        b_jets = fr.eval_sym2(field)
        cj = fr.codazzi_jets(b_jets)
        e = fr.value(fr.cov_deriv(cj))  # e[i,j,k,l] = nabla_i C_jkl
        b = fr.value(b_jets)
        w = np.einsum("pm,qrsm->pqrs", b, r31)
        # terms: T[i,j,k,l] reads (i,j,l,k), (j,k,i,l), (k,l,j,i), (l,i,k,j)
        perms = [(0, 1, 3, 2), (2, 0, 1, 3), (3, 2, 0, 1), (1, 3, 2, 0)]
        lhs = sum(e.transpose(p) for p in perms)
        rhs = sum(w.transpose(p) for p in perms)
        return _report(kind, lhs, rhs, fro(b) * fro(r31))

    if kind == "lovelock_riemann":
        lhs = cyclic3(fr.value(fr.cov_deriv(fr.div_riemann_jets)))
        rhs = -cyclic3(np.einsum("im,jklm->ijkl", fr.mixed_ricci, r04))
        return _report(kind, lhs, rhs, fro(fr.mixed_ricci) * fro(r04))

    if kind == "lovelock_weyl":
        lhs = cyclic3(fr.value(fr.cov_deriv(fr.div_weyl_jets)))
        rhs = -(n - 3) / (n - 2) * cyclic3(np.einsum("im,jklm->ijkl", fr.mixed_ricci, r04))
        return _report(kind, lhs, rhs, fro(fr.mixed_ricci) * fro(r04))

    if kind == "rc":
        b = fr.value(fr.eval_sym2(field))
        bup = b @ fr.metric.g_inv
        c04 = fr.value(fr.weyl04_jets)
        lhs = _compat_sum_values(bup, c04)
        base = _compat_sum_values(bup, r04)
        x = b @ fr.mixed_ricci.T  # b_im Ric_j^m
        a = x - x.T
        corr = (
            np.einsum("kl,ij->ijkl", gv, a)
            + np.einsum("il,jk->ijkl", gv, a)
            + np.einsum("jl,ki->ijkl", gv, a)
        ) / (n - 2)
        return _report(kind, lhs, base + corr, fro(b) * fro(r04))

    if kind == "ccodd":
        b_jets = fr.eval_sym2(field)
        cj = fr.codazzi_jets(b_jets)
        t = sp.tensordot(fr.ginv_jets, cj, axes=([0, 1], [1, 2]))  # C_j{m}^m
        tg = sp.mul(t[:, None, None, :], fr.g_jets[None, :, :, :])  # t_j g_kl
        d_jets = cj - (tg - tg.transpose(1, 0, 2, 3)) / (n - 2)
        lhs1 = cyclic3(fr.value(fr.cov_deriv(d_jets)))
        grad_c = fr.cov_deriv(cj)  # [a, i, j, m]
        dv = fr.value(sp.tensordot(fr.ginv_jets, grad_c, axes=([0, 1], [0, 3])))
        corr = (
            np.einsum("kl,ij->ijkl", gv, dv)
            + np.einsum("il,jk->ijkl", gv, dv)
            + np.einsum("jl,ki->ijkl", gv, dv)
        ) / (n - 2)
        rhs = lhs1 - corr
        b = fr.value(b_jets)
        bup = b @ fr.metric.g_inv
        c04 = fr.value(fr.weyl04_jets)
        lhs = _compat_sum_values(bup, c04)
        return _report(kind, lhs, rhs, fro(b) * fro(r04))

    # lovelock_4d: nine metric/traceless-part products summing to zero
    c = fr.value(fr.weyl04_jets)
    terms = [
        np.einsum("ar,bcst->abcrst", gv, c),
        np.einsum("br,cast->abcrst", gv, c),
        np.einsum("cr,abst->abcrst", gv, c),
        np.einsum("at,bcrs->abcrst", gv, c),
        np.einsum("bt,cars->abcrst", gv, c),
        np.einsum("ct,abrs->abcrst", gv, c),
        np.einsum("as,bctr->abcrst", gv, c),
        np.einsum("bs,catr->abcrst", gv, c),
        np.einsum("cs,abtr->abcrst", gv, c),
    ]
    total = sum(terms)
    scale = max(max(fro(x) for x in terms), _FLOOR)
    return IdentityReport(kind, _ANCHOR[kind], fro(total) / scale, fro(total), 0.0)


def weyl_divergence_defect(chart, point) -> IdentityReport:
    """Residual of div C_{jkl.} = (n-3)(nabla_k S_jl - nabla_j S_kl)."""
    fr = frame(chart, point)
    n = fr.n
    if n < 4:
        raise ValueError("needs dimension >= 4")
    lhs = fr.value(fr.div_weyl_jets)
    grad_s = fr.value(fr.cov_deriv(fr.schouten_jets))  # [a, i, j]
    # rhs[j,k,l] = (n-3)(nabla_k S_jl - nabla_j S_kl)
    rhs = (n - 3) * (np.einsum("kjl->jkl", grad_s) - grad_s)
    scale = max(fro(lhs), fro(rhs), _FLOOR)
    return IdentityReport(
        "weyl_divergence", _ANCHOR["weyl_divergence"], fro(lhs - rhs) / scale, fro(lhs), fro(rhs)
    )


# ---- vector field classification -------------------------------------------


@dataclass(frozen=True)
class VectorClassification:
    kind: str  # "concircular" | "torqued" | "recurrent" | "none"
    residual: float
    rho: float | None = None
    alpha: np.ndarray | None = None
    p: np.ndarray | None = None
    orthogonality: float | None = None


def classify_vector_field(chart, X: VectorField, point, fit_tol: float = 1e-8) -> VectorClassification:
    """Least-squares fit of nabla X to the concircular, torqued and recurrent shapes.

    Fit order matters: a parallel field matches every shape with degenerate
    parameters and is reported concircular (rho = 0).  The torqued shape
    additionally requires the fitted alpha to be orthogonal to the field.
    """
    fr = frame(chart, point)
    grad = fr.value(fr.cov_deriv(fr.eval_oneform(X)))  # [i, j] = nabla_i X_j
    tau = fr.value(fr.eval_oneform(X))
    gv, ginv = fr.metric.g, fr.metric.g_inv
    n = fr.n
    scale = max(fro(grad), _FLOOR)

    rho = float(np.sum(grad * gv) / np.sum(gv * gv))
    res_conc = fro(grad - rho * gv) / scale
    if res_conc <= fit_tol:
        return VectorClassification("concircular", res_conc, rho=rho)

    cols = [gv.ravel()]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        cols.append(np.outer(e, tau).ravel())
    a_mat = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(a_mat, grad.ravel(), rcond=None)
    fit = (a_mat @ coef).reshape(n, n)
    res_torq = fro(grad - fit) / scale
    alpha = coef[1:]
    orth = abs(float(alpha @ ginv @ tau)) / max(
        float(np.linalg.norm(alpha) * np.linalg.norm(tau)), _FLOOR
    )
    if res_torq <= fit_tol and orth <= fit_tol:
        return VectorClassification(
            "torqued", res_torq, rho=float(coef[0]), alpha=alpha, orthogonality=orth
        )

    a_rec = a_mat[:, 1:]
    coef_r, *_ = np.linalg.lstsq(a_rec, grad.ravel(), rcond=None)
    res_rec = fro(grad - (a_rec @ coef_r).reshape(n, n)) / scale
    if res_rec <= fit_tol:
        return VectorClassification("recurrent", res_rec, p=coef_r)

    return VectorClassification("none", min(res_conc, res_torq, res_rec))


# ---- observer decomposition of the traceless curvature part ----------------


def electric_weyl(C, u, g: Metric, tol: float = 1e-8):
    """E_kl = C_{jklm} u^j u^m for a unit timelike observer u (dimension 4).

    Warns when u (x) u is not compatible with C, in which case the
    reconstruction below does not have to reproduce C.
    """
    from .compat import compat_defect
    from .tensors import components_of

    c = np.asarray(components_of(C), float)
    u = np.asarray(u, float)
    if g.n != 4:
        raise ValueError("observer decomposition implemented for dimension 4")
    uu = float(u @ g.g @ u)
    if abs(uu + 1.0) > 1e-10:
        raise ValueError(f"u must be unit timelike (u.u = -1), got {uu}")
    u_low = g.g @ u
    res = compat_defect(np.outer(u_low, u_low), c, g).residual
    if res > tol:
        warnings.warn(
            f"u (x) u is not compatible with the given tensor (residual {res:.3e}); "
            "the reconstruction identity need not hold",
            stacklevel=2,
        )
    return np.einsum("jklm,j,m->kl", c, u, u)


def weyl_from_electric(E, u, g: Metric):
    """Reconstruct the traceless curvature part from its electric tensor.

    C_abcd = 2(u_a u_d E_bc - u_a u_c E_bd + u_b u_c E_ad - u_b u_d E_ac)
             + g_ad E_bc - g_ac E_bd + g_bc E_ad - g_bd E_ac
    """
    E = np.asarray(E, float)
    u = np.asarray(u, float)
    if g.n != 4:
        raise ValueError("observer decomposition implemented for dimension 4")
    uu = float(u @ g.g @ u)
    if abs(uu + 1.0) > 1e-10:
        raise ValueError(f"u must be unit timelike (u.u = -1), got {uu}")
    ul = g.g @ u
    gv = g.g
    out = 2.0 * (
        np.einsum("a,d,bc->abcd", ul, ul, E)
        - np.einsum("a,c,bd->abcd", ul, ul, E)
        + np.einsum("b,c,ad->abcd", ul, ul, E)
        - np.einsum("b,d,ac->abcd", ul, ul, E)
    )
    out += (
        np.einsum("ad,bc->abcd", gv, E)
        - np.einsum("ac,bd->abcd", gv, E)
        + np.einsum("bc,ad->abcd", gv, E)
        - np.einsum("bd,ac->abcd", gv, E)
    )
    return out


# ---- maps -------------------------------------------------------------------


def mixed_compat_sum(b, riemann_mixed):
    """Cyclic sum b_im T_{jkl}^m — the compatibility sum in mixed form."""
    return cyclic3(np.einsum("im,jklm->ijkl", np.asarray(b, float), riemann_mixed))


def projective_of_mixed(riemann_mixed):
    """Projective combination R_{jkl}^m + (d_j^m Ric_kl - d_k^m Ric_jl)/(n-1)."""
    r31 = np.asarray(riemann_mixed, float)
    n = r31.shape[0]
    ric = np.trace(r31, axis1=1, axis2=3)
    eye = np.eye(n)
    return r31 + (
        np.einsum("jm,kl->jklm", eye, ric) - np.einsum("km,jl->jklm", eye, ric)
    ) / (n - 1)


@dataclass(frozen=True)
class GeodesicMapResult:
    riemann_mixed: np.ndarray
    p: np.ndarray
    asymmetry: float
    projective_residual: float


def geodesic_transform(source, X, grad_X) -> GeodesicMapResult:
    """Curvature transformation law of a geodesic map.

    ``source`` is a CurvaturePack or a mixed rank-4 array; ``X`` the one-form
    value and ``grad_X`` its covariant derivative matrix at the point.  With
    P = grad_X - X (x) X (must be symmetric; the asymmetry defect is
    reported), the transformed curvature is
    R_{jkl}^m - d_k^m P_jl + d_j^m P_kl.  The projective combination is
    unchanged, and for any symmetric b the compatibility sums of the old and
    new curvature agree.
    """
    r31 = source.riemann_mixed if isinstance(source, CurvaturePack) else np.asarray(source, float)
    X = np.asarray(X, float)
    grad_X = np.asarray(grad_X, float)
    p = grad_X - np.outer(X, X)
    asym = fro(p - p.T) / max(fro(p), _FLOOR)
    p = 0.5 * (p + p.T)
    n = r31.shape[0]
    eye = np.eye(n)
    rbar = (
        r31
        - np.einsum("km,jl->jklm", eye, p)
        + np.einsum("jm,kl->jklm", eye, p)
    )
    before = projective_of_mixed(r31)
    after = projective_of_mixed(rbar)
    proj_res = fro(after - before) / max(fro(before), _FLOOR)
    return GeodesicMapResult(rbar, p, asym, proj_res)


def conformal_transform(chart: MetricChart, sigma: ScalarField) -> MetricChart:
    """Chart with metric rescaled by exp(2 sigma); the mixed traceless part is unchanged."""
    from .jets import exp as jexp

    base = chart.components
    n = chart.n

    def comps(xs):
        raw = base(xs)
        s = sigma.components(xs)
        f = jexp(2.0 * s) if isinstance(s, Jet) else float(np.exp(2.0 * float(s)))
        return [[f * raw[i][j] for j in range(n)] for i in range(n)]

    name = f"{chart.name}~conformal" if chart.name else "conformal"
    return MetricChart(n, comps, chart.signature, name=name)


# ---- derived Codazzi family --------------------------------------------------


def codazzi_candidate_from_potential(chart, f: ScalarField, point):
    """Second derivative of a potential minus its space-form trace correction.

    On a constant-curvature chart with scalar curvature R the value
    b = grad grad f - R/(n(n-1)) f g has vanishing Codazzi deviation.
    Returns (b_value, deviation_norm, b_norm).
    """
    fr = frame(chart, point)
    sp = fr.space
    fj = fr.eval_scalar(f)
    grad_f = sp.grad(fj)
    hess = fr.cov_deriv(grad_f)
    n = fr.n
    c = float(fr.value(fr.rscal_jets)) / (n * (n - 1))
    b_jets = hess - c * sp.mul(fj[None, None, :], fr.g_jets)
    b_jets = 0.5 * (b_jets + b_jets.transpose(1, 0, 2))
    dev = fr.value(fr.codazzi_jets(b_jets))
    return fr.value(b_jets), fro(dev), fro(fr.value(b_jets))

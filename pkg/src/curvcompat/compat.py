"""The compatibility relation between symmetric tensors and curvature tensors.

A symmetric b is compatible with a curvature-symmetric K when the cyclic
contraction b_i^m K_{jklm} + b_j^m K_{kilm} + b_k^m K_{ijlm} vanishes.  This
module provides the defect operator, the derived commutator and eigenvector
consequences, the symmetrized-product closure, the two rank-4 constructions
built from compatible pairs, inverse compatibility, the four-term alternating
identity, and the characterization of the constant-curvature form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .tensors import (
    DEFAULT_TOLERANCE,
    GCT,
    Metric,
    RandomSpec,
    Tolerance,
    components_of,
    cyclic3,
    fro,
    kulkarni_nomizu,
    mixed,
    random_sym2,
    rel_residual,
)

__all__ = [
    "CompatDefect",
    "EigenSystem",
    "compat_defect",
    "is_compatible",
    "ricci_of",
    "ricci_commutator",
    "hat_commutator",
    "jordan_product",
    "ring_gct",
    "kprime_gct",
    "inverse_compat_defect",
    "veblen_defect",
    "eigen_mixed",
    "derdzinski_shen_check",
    "const_curv_decompose",
    "universal_compat_test",
    "rank_one_ricci_check",
    "constant_curvature_gct",
    "kn_pair",
    "constant_curvature_pair",
]


@dataclass(frozen=True)
class CompatDefect:
    """Rank-4 defect of the compatibility relation plus its relative residual.

    The defect is invariant under cyclic permutation of its first three slots
    by construction; the residual is scaled by ||b|| * ||K||.
    """

    defect: np.ndarray
    residual: float


def _tol_of(tol) -> float:
    if tol is None:
        return DEFAULT_TOLERANCE.rel_algebra
    if isinstance(tol, Tolerance):
        return tol.rel_algebra
    return float(tol)


def compat_defect(b, K, g: Metric) -> CompatDefect:
    """Defect_{ijkl} = b_i^m K_{jklm} + b_j^m K_{kilm} + b_k^m K_{ijlm}."""
    Kc = np.asarray(components_of(K), float)
    b = np.asarray(b, float)
    bup = b @ g.g_inv  # b_i^m
    first = np.einsum("im,jklm->ijkl", bup, Kc)
    defect = cyclic3(first)
    residual, _ = rel_residual(fro(defect), [fro(b), fro(Kc)])
    return CompatDefect(defect=defect, residual=residual)


def is_compatible(b, K, g: Metric, tol=None) -> bool:
    """True when the compatibility residual is below tol (default rel_algebra)."""
    return compat_defect(b, K, g).residual <= _tol_of(tol)


def ricci_of(K, g: Metric) -> np.ndarray:
    """Contraction K_jl = K_{jml}^m, exactly symmetrized after the contraction."""
    Kc = np.asarray(components_of(K), float)
    ric = np.einsum("jmls,sm->jl", Kc, g.g_inv)
    asym = fro(ric - ric.T)
    if asym > 1e-12 * max(fro(ric), DEFAULT_TOLERANCE.floor):
        warnings.warn(f"contracted tensor has symmetry defect {asym:.3e}", stacklevel=2)
    return 0.5 * (ric + ric.T)


def ricci_commutator(b, K, g: Metric) -> np.ndarray:
    """Commutator of the mixed forms of b and of the contraction of K."""
    bm = mixed(b, g)
    rm = mixed(ricci_of(K, g), g)
    return bm @ rm - rm @ bm


def hat_commutator(b, K, g: Metric) -> np.ndarray:
    """Commutator of b with K-hat_{jm} = K_{jklm} b^{kl} (both in mixed form)."""
    Kc = np.asarray(components_of(K), float)
    b = np.asarray(b, float)
    b_upup = g.g_inv @ b @ g.g_inv
    khat = np.einsum("jklm,kl->jm", Kc, b_upup)
    bm = mixed(b, g)
    km = mixed(0.5 * (khat + khat.T), g)
    return bm @ km - km @ bm


def jordan_product(a, b, g: Metric) -> np.ndarray:
    """Symmetrized product c_ij = (a_i^k b_kj + b_i^k a_kj) / 2."""
    ab = mixed(a, g).T @ np.asarray(b, float)  # a_i^k b_kj; mixed(a).T has rows a_i^k
    return 0.5 * (ab + ab.T)


def ring_gct(a, b, K, g: Metric, tol=None):
    """New curvature-symmetric value K_{jkrs}(a^r_l b^s_m + b^r_l a^s_m).

    Requires a and b each compatible with K; a violated precondition
    downgrades the output to a plain rank-4 array with a warning, since the
    cyclic identity is then not guaranteed.
    """
    Kc = np.asarray(components_of(K), float)
    am = mixed(a, g)  # a^r_l
    bm = mixed(b, g)
    out = np.einsum("jkrs,rl,sm->jklm", Kc, am, bm) + np.einsum(
        "jkrs,rl,sm->jklm", Kc, bm, am
    )
    t = _tol_of(tol)
    ra = compat_defect(a, Kc, g).residual
    rb = compat_defect(b, Kc, g).residual
    if ra > t or rb > t:
        warnings.warn(
            f"inputs are not compatible with K (residuals {ra:.3e}, {rb:.3e}); "
            "returning a plain rank-4 array",
            stacklevel=2,
        )
        return out
    return GCT(out, tol=max(t, 1e-12))


def kprime_gct(b, K, g: Metric, tol=None):
    """Derived curvature value K'_{jklm} = K_{jkls} b^s_m - K_{jkms} b^s_l."""
    Kc = np.asarray(components_of(K), float)
    bm = mixed(b, g)
    out = np.einsum("jkls,sm->jklm", Kc, bm) - np.einsum("jkms,sl->jklm", Kc, bm)
    t = _tol_of(tol)
    rb = compat_defect(b, Kc, g).residual
    if rb > t:
        warnings.warn(
            f"b is not compatible with K (residual {rb:.3e}); returning a plain rank-4 array",
            stacklevel=2,
        )
        return out
    return GCT(out, tol=max(t, 1e-12))


def inverse_compat_defect(b, K, g: Metric) -> CompatDefect:
    """Compatibility defect of the inverse of b (inverse of the mixed form, lowered)."""
    b = np.asarray(b, float)
    bm = mixed(b, g)
    det = abs(float(np.linalg.det(bm)))
    scale = max(fro(bm), DEFAULT_TOLERANCE.floor) ** g.n
    if det < 1e-12 * scale:
        raise np.linalg.LinAlgError(f"b is numerically singular (|det| {det:.3e})")
    binv = g.g @ np.linalg.inv(bm)
    binv = 0.5 * (binv + binv.T)
    return compat_defect(binv, K, g)


def veblen_defect(b, K, g: Metric):
    """Four-term alternating combination; vanishes whenever b is compatible with K.

    Returns (defect, residual) with the defect
    b_i^m K_{jklm} - b_j^m K_{ilkm} + b_k^m K_{iljm} - b_l^m K_{jkim}.
    """
    Kc = np.asarray(components_of(K), float)
    bup = np.asarray(b, float) @ g.g_inv
    defect = (
        np.einsum("im,jklm->ijkl", bup, Kc)
        - np.einsum("jm,ilkm->ijkl", bup, Kc)
        + np.einsum("km,iljm->ijkl", bup, Kc)
        - np.einsum("lm,jkim->ijkl", bup, Kc)
    )
    residual, _ = rel_residual(fro(defect), [fro(b), fro(Kc)])
    return defect, residual


@dataclass(frozen=True)
class EigenSystem:
    """Real eigendecomposition of a mixed form b^i_j, when one exists.

    In indefinite signature the mixed form need not be diagonalizable over
    the reals; such spectra get status ``inapplicable`` instead of an error.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, contravariant components
    status: str  # "real-diagonalizable" | "inapplicable"


def eigen_mixed(b, g: Metric, tol: float = 1e-10) -> EigenSystem:
    """Eigenvalues/eigenvectors of b^i_j = g^{ik} b_{kj}."""
    bm = mixed(b, g)
    w, v = np.linalg.eig(bm)
    scale = max(float(np.abs(w).max()), DEFAULT_TOLERANCE.floor)
    if float(np.abs(w.imag).max()) > tol * scale:
        return EigenSystem(np.zeros(0), np.zeros((g.n, 0)), "inapplicable")
    w = w.real
    v = v.real
    if np.linalg.matrix_rank(v, tol=1e-8) < g.n:
        return EigenSystem(np.zeros(0), np.zeros((g.n, 0)), "inapplicable")
    resid = fro(bm @ v - v * w[None, :]) / max(fro(bm), DEFAULT_TOLERANCE.floor)
    if resid > tol:
        return EigenSystem(np.zeros(0), np.zeros((g.n, 0)), "inapplicable")
    return EigenSystem(w, v, "real-diagonalizable")


@dataclass(frozen=True)
class TripleContraction:
    indices: tuple
    eigenvalues: tuple
    max_abs: float
    max_rel: float


@dataclass(frozen=True)
class DSReport:
    """Eigenvector-contraction report: one entry per qualifying ordered triple."""

    status: str  # "checked" | "inapplicable" | "no-applicable-triples"
    triples: list
    max_residual: float
    passed: bool


def derdzinski_shen_check(b, K, g: Metric, tol=None, gap: float = 1e-8) -> DSReport:
    """Check the eigenvector contractions implied by compatibility.

    For every ordered eigenvector triple (X, Y, Z) of the mixed form of b
    whose third eigenvalue z differs from x and from y by a relative gap,
    the contraction of K with X, Y, Z on any three of its four slots must
    vanish.  All four slot choices are checked; eigenvalue distinctness uses
    a relative gap threshold on the spectral scale.
    """
    t = _tol_of(tol) if tol is not None else 1e-10
    es = eigen_mixed(b, g)
    if es.status != "real-diagonalizable":
        return DSReport("inapplicable", [], 0.0, True)
    Kc = np.asarray(components_of(K), float)
    knorm = max(fro(Kc), DEFAULT_TOLERANCE.floor)
    w = es.eigenvalues
    scale = max(float(np.abs(w).max()), DEFAULT_TOLERANCE.floor)
    n = g.n
    triples = []
    max_rel = 0.0
    slots = [
        ("ijkl,i,j,k->l", "l free"),
        ("ijkl,i,j,l->k", "k free"),
        ("ijkl,i,k,l->j", "j free"),
        ("ijkl,j,k,l->i", "i free"),
    ]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                x, y, z = w[p], w[q], w[r]
                if abs(z - x) <= gap * scale or abs(z - y) <= gap * scale:
                    continue
                X, Y, Z = es.eigenvectors[:, p], es.eigenvectors[:, q], es.eigenvectors[:, r]
                denom = knorm * max(
                    float(np.linalg.norm(X) * np.linalg.norm(Y) * np.linalg.norm(Z)),
                    DEFAULT_TOLERANCE.floor,
                )
                worst = 0.0
                for spec, _ in slots:
                    val = float(np.abs(np.einsum(spec, Kc, X, Y, Z)).max())
                    worst = max(worst, val)
                rel = worst / denom
                max_rel = max(max_rel, rel)
                triples.append(TripleContraction((p, q, r), (x, y, z), worst, rel))
    if not triples:
        return DSReport("no-applicable-triples", [], 0.0, True)
    return DSReport("checked", triples, max_rel, max_rel <= t)


def const_curv_decompose(K, g: Metric):
    """Scalar part and residual of the constant-curvature form of K.

    Returns (k_scal, residual) where k_scal is the full double trace and the
    residual measures ||K - k_scal/(n(n-1)) * (g^g)/2|| relative to ||K||.
    """
    Kc = np.asarray(components_of(K), float)
    n = g.n
    ric = np.einsum("jmls,sm->jl", Kc, g.g_inv)
    k_scal = float(np.einsum("jl,jl->", g.g_inv, ric))
    model = (k_scal / (n * (n - 1))) * 0.5 * kulkarni_nomizu(g.g, g.g).components
    residual, _ = rel_residual(fro(Kc - model), [fro(Kc)])
    return k_scal, residual


@dataclass(frozen=True)
class UniversalCompatReport:
    """Residuals of the compatibility defect against a random ensemble of b."""

    trials: int
    residuals: list  # (seed, residual) pairs
    max_residual: float


def universal_compat_test(K, g: Metric, trials: int, spec: RandomSpec) -> UniversalCompatReport:
    """Probe K against ``trials`` seeded random symmetric tensors.

    A constant-curvature K passes every trial; any other K must be witnessed
    by at least one large residual (callers assert the direction they need).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = []
    for t in range(trials):
        seed = int(spec.seed) + t
        b = random_sym2(RandomSpec(seed=seed, scale=spec.scale), g.n)
        out.append((seed, compat_defect(b, K, g).residual))
    return UniversalCompatReport(trials, out, max(r for _, r in out))


@dataclass(frozen=True)
class RankOneRicciReport:
    applicable: bool
    compat_residual: float
    rejection: float
    passed: bool
    message: str = ""


def rank_one_ricci_check(u, K, g: Metric, tol=None) -> RankOneRicciReport:
    """Check that a non-null u with compatible u (x) u is a Ricci eigenvector.

    ``u`` is contravariant.  The rejection is the component of Ric(u)
    orthogonal to u, scaled by ||Ric|| ||u||.
    """
    t = _tol_of(tol)
    u = np.asarray(u, float)
    u_low = g.g @ u
    uu = float(u @ g.g @ u)
    if abs(uu) <= 1e-10 * float(u @ u):
        return RankOneRicciReport(False, 0.0, 0.0, True, "null vector: hypothesis excluded")
    b = np.outer(u_low, u_low)
    cd = compat_defect(b, K, g)
    if cd.residual > t:
        return RankOneRicciReport(
            False, cd.residual, 0.0, False, "u (x) u is not compatible with K"
        )
    ric = ricci_of(K, g)
    w = ric @ u
    lam = float(u @ ric @ u) / uu
    denom = max(fro(ric) * float(np.linalg.norm(u)), DEFAULT_TOLERANCE.floor)
    rejection = float(np.linalg.norm(w - lam * u_low)) / denom
    return RankOneRicciReport(True, cd.residual, rejection, rejection <= t)


# ---- compatible-pair factories --------------------------------------------
#
# The two closed-form families of compatible pairs: (b, b^b) for any
# symmetric b, and (anything, constant-curvature K).  Both are verified by
# the defect oracle in the tests before being leaned on.


def constant_curvature_gct(g: Metric, k_scal: float) -> GCT:
    """K = k_scal/(n(n-1)) * (g ^ g)/2, the constant-curvature form."""
    n = g.n
    return GCT(
        (k_scal / (n * (n - 1))) * 0.5 * kulkarni_nomizu(g.g, g.g).components,
        tol=1e-12,
    )


def kn_pair(seed: int, n: int, g: Metric = None, scale: float = 1.0, max_cond: float = 1e4):
    """Seeded compatible pair (b, b ^ b); b redrawn while badly conditioned.

    The conditioning bound keeps derived checks (inverse compatibility) well
    inside their tolerances.  Returns (b, K, g).
    """
    if g is None:
        g = Metric(np.eye(n))
    for k in range(100):
        b = random_sym2(RandomSpec(seed=seed + 7919 * k, scale=scale), n)
        bm = mixed(b, g)
        if np.linalg.cond(bm) <= max_cond:
            return b, kulkarni_nomizu(b, b), g
    raise RuntimeError("could not draw a well-conditioned b in 100 attempts")


def constant_curvature_pair(seed: int, n: int, g: Metric = None, k_scal: float = 2.0, scale: float = 1.0):
    """Seeded (b, K, g) with K the constant-curvature form (compatible with any b)."""
    if g is None:
        g = Metric(np.eye(n))
    b = random_sym2(RandomSpec(seed=seed, scale=scale), n)
    return b, constant_curvature_gct(g, k_scal), g

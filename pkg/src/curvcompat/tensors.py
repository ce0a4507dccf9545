"""Dense multilinear algebra over an n-dimensional vector space with a (pseudo-)metric.

All values are covariant components in one fixed coordinate basis, stored as
plain float64 ndarrays: symmetric rank-2 values are (n, n) arrays, rank-4
values are full (n, n, n, n) arrays with no symmetry compression.  The
Frobenius norm is the single norm used for every residual.  Everything here
is a pure function over immutable inputs; the only stateful object is the
seeded random generator confined inside the ``random_*`` constructors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "RandomSpec",
    "Metric",
    "GCT",
    "fro",
    "rel_residual",
    "raise_index",
    "lower_index",
    "mixed",
    "kulkarni_nomizu",
    "cyclic3",
    "gct_project",
    "gct_residuals",
    "random_sym2",
    "random_metric",
    "random_gct",
    "components_of",
]


def fro(x) -> float:
    """Frobenius norm of an array (or of a GCT's components)."""
    return float(np.linalg.norm(np.asarray(components_of(x), float).ravel()))


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerances for checks, plus an absolute floor for zero-norm denominators."""

    rel_algebra: float = 1e-10
    rel_geometry: float = 1e-7
    floor: float = 1e-14

    def __post_init__(self):
        if min(self.rel_algebra, self.rel_geometry, self.floor) <= 0.0:
            raise ValueError("tolerances must be positive")


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class RandomSpec:
    """Seed and component magnitude bound for the deterministic random constructors."""

    seed: int
    scale: float = 1.0


def rel_residual(defect_norm, scale_norms, tol=None, floor=None):
    """Relative residual ``defect / max(prod(scales), floor)`` and its pass flag.

    ``tol`` may be a float or a Tolerance (whose ``rel_algebra`` is used).
    """
    if tol is None:
        tol = DEFAULT_TOLERANCE.rel_algebra
    if isinstance(tol, Tolerance):
        if floor is None:
            floor = tol.floor
        tol = tol.rel_algebra
    if floor is None:
        floor = DEFAULT_TOLERANCE.floor
    if defect_norm < 0 or any(s < 0 for s in scale_norms):
        raise ValueError("norms must be nonnegative")
    denom = max(float(np.prod([float(s) for s in scale_norms])), floor)
    residual = float(defect_norm) / denom
    return residual, residual <= tol


class Metric:
    """Symmetric invertible n x n value with signature, used for raising/lowering.

    The inverse is computed once at construction and validated against the
    identity to 1e-13 relative; the signature is the sorted tuple of
    eigenvalue signs.  Stored arrays are read-only.
    """

    __slots__ = ("g", "g_inv", "signature")

    def __init__(self, g, tol: float = 1e-13):
        g = np.array(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        if g.shape[0] < 2:
            raise ValueError("metric dimension must be at least 2")
        nrm = max(float(np.linalg.norm(g)), 1e-300)
        if float(np.linalg.norm(g - g.T)) > tol * nrm:
            raise ValueError("metric components are not symmetric")
        g = 0.5 * (g + g.T)
        g_inv = np.linalg.inv(g)
        n = g.shape[0]
        ident = float(np.linalg.norm(g @ g_inv - np.eye(n))) / np.sqrt(n)
        if ident > tol:
            raise ValueError(f"metric is numerically singular (g*ginv residual {ident:.3e})")
        eig = np.linalg.eigvalsh(g)
        self.g = g
        self.g_inv = g_inv
        self.signature = tuple(int(s) for s in np.sort(np.sign(eig)))
        self.g.flags.writeable = False
        self.g_inv.flags.writeable = False

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def __repr__(self):
        return f"Metric(n={self.n}, signature={self.signature})"


def cyclic3(T):
    """Sum of T over cyclic permutations of its first three slots.

    Trailing axes beyond the fourth (e.g. a jet coefficient axis) ride along.
    """
    T = np.asarray(T)
    rest = tuple(range(4, T.ndim))
    return T + T.transpose((1, 2, 0, 3) + rest) + T.transpose((2, 0, 1, 3) + rest)


def _cyclic_last3(K):
    # K_{j(klm)} = K_{jklm} + K_{jlmk} + K_{jmkl}
    return K + K.transpose(0, 2, 3, 1) + K.transpose(0, 3, 1, 2)


def gct_residuals(K) -> dict:
    """Relative residuals of the four curvature-symmetry invariants of K."""
    K = np.asarray(components_of(K), float)
    nrm = max(float(np.linalg.norm(K)), DEFAULT_TOLERANCE.floor)
    return {
        "antisym_first_pair": float(np.linalg.norm(K + K.transpose(1, 0, 2, 3))) / nrm,
        "antisym_second_pair": float(np.linalg.norm(K + K.transpose(0, 1, 3, 2))) / nrm,
        "first_bianchi": float(np.linalg.norm(cyclic3(K))) / nrm,
        "pair_exchange": float(np.linalg.norm(K - K.transpose(2, 3, 0, 1))) / nrm,
        "last_three_cyclic": float(np.linalg.norm(_cyclic_last3(K))) / nrm,
    }


class GCT:
    """Covariant rank-4 value carrying the curvature symmetries as invariants.

    Construction validates, relative to the Frobenius norm: antisymmetry in
    each index pair, the first-Bianchi cyclic identity on the first three
    slots, pair-exchange symmetry, and the cyclic identity on the last three
    slots.  ``tol`` is the relative tolerance used for that validation.
    """

    __slots__ = ("components", "tol")

    def __init__(self, components, tol: float = 1e-10, check: bool = True):
        K = np.array(components_of(components), dtype=float)
        if K.ndim != 4 or len(set(K.shape)) != 1:
            raise ValueError(f"expected an (n,n,n,n) array, got shape {K.shape}")
        if check:
            bad = {k: v for k, v in gct_residuals(K).items() if v > tol}
            if bad:
                worst = ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
                raise ValueError(f"components violate curvature symmetries: {worst}")
        self.components = K
        self.tol = tol
        self.components.flags.writeable = False

    @property
    def n(self) -> int:
        return self.components.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def residuals(self) -> dict:
        return gct_residuals(self.components)

    def __array__(self, dtype=None, copy=None):
        arr = self.components
        return arr.astype(dtype) if dtype is not None else arr

    def __repr__(self):
        return f"GCT(n={self.n}, norm={self.norm():.6g})"


def components_of(K):
    """Raw component array of a GCT, passing plain arrays through."""
    return K.components if isinstance(K, GCT) else K


def lower_index(T, g: Metric, axis: int = -1):
    """Lower one slot of a covariant/mixed value by contracting it with g."""
    T = np.asarray(components_of(T), float)
    axis = axis % T.ndim
    out = np.tensordot(T, g.g, axes=([axis], [0]))
    return np.moveaxis(out, -1, axis)


def raise_index(T, g: Metric, axis: int = -1):
    """Raise one slot by contracting it with the inverse metric."""
    T = np.asarray(components_of(T), float)
    axis = axis % T.ndim
    out = np.tensordot(T, g.g_inv, axes=([axis], [0]))
    return np.moveaxis(out, -1, axis)


def mixed(b, g: Metric):
    """Mixed form b^i_j = g^{ik} b_{kj} of a covariant rank-2 value."""
    return g.g_inv @ np.asarray(b, float)


def kulkarni_nomizu(a, b) -> GCT:
    """Kulkarni-Nomizu product of two symmetric rank-2 values.

    (a ^ b)_{ijlm} = a_il b_jm + a_jm b_il - a_im b_jl - a_jl b_im
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    T = (
        np.einsum("il,jm->ijlm", a, b)
        + np.einsum("jm,il->ijlm", a, b)
        - np.einsum("im,jl->ijlm", a, b)
        - np.einsum("jl,im->ijlm", a, b)
    )
    return GCT(T, tol=1e-12)


def gct_project(T) -> GCT:
    """Project a rank-4 value onto the curvature-symmetry class.

    Antisymmetrize both index pairs, symmetrize under pair exchange, then
    remove the totally antisymmetric part that violates the first Bianchi
    identity.  Idempotent; any value already satisfying the symmetries is a
    fixed point.
    """
    T = np.asarray(components_of(T), float)
    A = 0.25 * (
        T
        - T.transpose(1, 0, 2, 3)
        - T.transpose(0, 1, 3, 2)
        + T.transpose(1, 0, 3, 2)
    )
    S = 0.5 * (A + A.transpose(2, 3, 0, 1))
    P = S - cyclic3(S) / 3.0
    return GCT(P, tol=1e-12)


def random_sym2(spec: RandomSpec, n: int):
    """Seeded random symmetric (n, n) value with entries bounded by spec.scale."""
    rng = np.random.default_rng(spec.seed)
    a = rng.uniform(-spec.scale, spec.scale, size=(n, n))
    return 0.5 * (a + a.T)


def random_metric(spec: RandomSpec, n: int, signature=None) -> Metric:
    """Seeded random metric Q^T diag(signature) Q with Q invertible.

    Congruence by an invertible Q preserves the signature exactly, so no
    eigenvalue post-processing is needed.  Q is resampled while its condition
    number is large, keeping the inverse accurate to the Metric invariant.
    """
    if signature is None:
        signature = (1,) * n
    signature = tuple(int(s) for s in signature)
    if len(signature) != n or any(s not in (-1, 1) for s in signature):
        raise ValueError("signature must be n entries of +1/-1")
    rng = np.random.default_rng(spec.seed)
    for _ in range(100):
        q = rng.uniform(-spec.scale, spec.scale, size=(n, n))
        if np.linalg.cond(q) < 50.0:
            m = Metric(q.T @ np.diag(signature) @ q)
            if m.signature == tuple(sorted(signature)):
                return m
    raise RuntimeError("failed to draw a well-conditioned metric in 100 attempts")


def random_gct(spec: RandomSpec, n: int) -> GCT:
    """Seeded random GCT: the symmetry projection of a random rank-4 value.

    Resamples when the projection lands below the norm floor (degenerate
    draw); raises after 100 attempts.
    """
    rng = np.random.default_rng(spec.seed)
    for _ in range(100):
        T = rng.uniform(-spec.scale, spec.scale, size=(n, n, n, n))
        P = gct_project(T)
        if P.norm() >= DEFAULT_TOLERANCE.floor:
            return P
    raise RuntimeError("random_gct: 100 resampling attempts produced only degenerate values")

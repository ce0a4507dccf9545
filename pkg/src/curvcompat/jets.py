"""Truncated multivariate Taylor jets for exact higher-order differentiation.

A jet holds the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha! of a
smooth function at a point, for every multi-index alpha with |alpha| <= order.
Jet arithmetic reproduces the coefficients of sums, products, quotients and
smooth compositions exactly to rounding, so fourth-derivative quantities keep
full precision where nested finite differencing would lose it.

Two layers share one table set per (nvars, order):

* ``Jet`` -- a scalar with operator overloading, the type chart component
  functions are evaluated on;
* vectorized kernels on plain ndarrays whose LAST axis is the coefficient
  axis (``JetSpace.mul``, ``tensordot``, ``diff``, ``matrix_inverse``), used
  by the curvature pipeline to process whole tensors of jets at once.

Coefficients of total degree d of any product depend only on factor
coefficients of degree <= d, and a partial derivative shifts degrees down by
one.  Consequently a pipeline that applies at most k derivative shifts to
jets seeded at order m extracts correct point values whenever k <= m; no
per-value order tracking is required.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

__all__ = ["Jet", "JetSpace", "jet_space", "sin", "cos", "tan", "exp", "log", "sqrt"]


def _monomials(nvars: int, order: int):
    monos = [(0,) * nvars]
    for deg in range(1, order + 1):
        seen = []
        for combo in combinations_with_replacement(range(nvars), deg):
            alpha = [0] * nvars
            for v in combo:
                alpha[v] += 1
            seen.append(tuple(alpha))
        monos.extend(sorted(set(seen)))
    return monos


class JetSpace:
    """Monomial tables and coefficient kernels for one (nvars, order) pair."""

    def __init__(self, nvars: int, order: int):
        if nvars < 1 or order < 1:
            raise ValueError("need nvars >= 1 and order >= 1")
        self.nvars = nvars
        self.order = order
        self.monomials = _monomials(nvars, order)
        self.ncoeff = len(self.monomials)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.degree = np.array([sum(m) for m in self.monomials])
        self.factorial = np.array(
            [float(np.prod([math.factorial(a) for a in m])) for m in self.monomials]
        )
        self._build_product_table()
        self._build_derivative_tables()

    def _build_product_table(self):
        ti, tj, tk = [], [], []
        for i, a in enumerate(self.monomials):
            da = sum(a)
            for j, b in enumerate(self.monomials):
                if da + sum(b) > self.order:
                    continue
                ti.append(i)
                tj.append(j)
                tk.append(self.index[tuple(x + y for x, y in zip(a, b))])
        ti = np.array(ti)
        tj = np.array(tj)
        tk = np.array(tk)
        perm = np.argsort(tk, kind="stable")
        self._ti = ti[perm]
        self._tj = tj[perm]
        tk = tk[perm]
        starts = np.flatnonzero(np.r_[True, tk[1:] != tk[:-1]])
        # every output coefficient receives at least the (constant, k) pair
        assert starts.size == self.ncoeff
        self._starts = starts

    def _build_derivative_tables(self):
        self._dtab = []
        for v in range(self.nvars):
            dst, src, fac = [], [], []
            for i, m in enumerate(self.monomials):
                if sum(m) >= self.order:
                    continue
                up = list(m)
                up[v] += 1
                dst.append(i)
                src.append(self.index[tuple(up)])
                fac.append(float(m[v] + 1))
            self._dtab.append((np.array(dst), np.array(src), np.array(fac)))

    # ---- construction -------------------------------------------------

    def zeros(self, shape=()):
        return np.zeros(tuple(shape) + (self.ncoeff,))

    def constant(self, value) -> "Jet":
        c = np.zeros(self.ncoeff)
        c[0] = float(value)
        return Jet(self, c)

    def variable(self, v: int, value) -> "Jet":
        c = np.zeros(self.ncoeff)
        c[0] = float(value)
        ev = tuple(1 if i == v else 0 for i in range(self.nvars))
        c[self.index[ev]] = 1.0
        return Jet(self, c)

    def variables(self, point):
        point = np.asarray(point, float)
        if point.shape != (self.nvars,):
            raise ValueError(f"point must have {self.nvars} coordinates")
        return [self.variable(v, point[v]) for v in range(self.nvars)]

    def constant_array(self, values):
        values = np.asarray(values, float)
        out = self.zeros(values.shape)
        out[..., 0] = values
        return out

    # ---- vectorized kernels (coefficient axis last) --------------------

    def mul(self, a, b):
        """Jet product, broadcasting over the leading axes of a and b."""
        p = a[..., self._ti] * b[..., self._tj]
        return np.add.reduceat(p, self._starts, axis=-1)

    def diff(self, a, v: int):
        """Partial derivative with respect to coordinate v (top degree drops)."""
        dst, src, fac = self._dtab[v]
        out = np.zeros_like(a)
        out[..., dst] = a[..., src] * fac
        return out

    def grad(self, a):
        """Stack of all partial derivatives, new axis first."""
        return np.stack([self.diff(a, v) for v in range(self.nvars)], axis=0)

    def tensordot(self, a, b, axes):
        """Jet-valued tensordot over the listed tensor axes (coeff axis excluded)."""
        ax_a = [x % (a.ndim - 1) for x in axes[0]]
        ax_b = [x % (b.ndim - 1) for x in axes[1]]
        k = len(ax_a)
        a2 = np.moveaxis(a, ax_a, range(a.ndim - 1 - k, a.ndim - 1))
        b2 = np.moveaxis(b, ax_b, range(k))
        fa = a2.shape[: a.ndim - 1 - k]
        fb = b2.shape[k:-1]
        ksz = int(np.prod(a2.shape[a.ndim - 1 - k : -1], dtype=int))
        a2 = a2.reshape((-1, ksz, self.ncoeff))
        b2 = b2.reshape((ksz, -1, self.ncoeff))
        p = self.mul(a2[:, :, None, :], b2[None, :, :, :])
        return p.sum(axis=1).reshape(fa + fb + (self.ncoeff,))

    def matmul(self, a, b):
        """Matrix product of (n, m, C) and (m, p, C) jet matrices."""
        return self.tensordot(a, b, axes=([1], [0]))

    def matrix_inverse(self, gmat):
        """Inverse of an (n, n, C) jet matrix by Newton iteration.

        Seeded with the exact inverse of the value part, the residual is
        nilpotent (no constant term) and squares each step, so
        ceil(log2(order + 1)) steps suffice.
        """
        n = gmat.shape[0]
        x = self.zeros((n, n))
        x[..., 0] = np.linalg.inv(gmat[..., 0])
        two_i = self.zeros((n, n))
        two_i[np.arange(n), np.arange(n), 0] = 2.0
        for _ in range(max(1, math.ceil(math.log2(self.order + 1)))):
            x = self.matmul(x, two_i - self.matmul(gmat, x))
        return x

    @staticmethod
    def value(a):
        """Point values of a jet array (drop the coefficient axis)."""
        return np.asarray(a)[..., 0]

    def __repr__(self):
        return f"JetSpace(nvars={self.nvars}, order={self.order}, ncoeff={self.ncoeff})"


@lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


_SCALAR = (int, float, np.integer, np.floating)


class Jet:
    """Scalar jet: a value bundled with Taylor coefficients to the space order."""

    __slots__ = ("space", "c")

    def __init__(self, space: JetSpace, coeffs):
        self.space = space
        self.c = np.asarray(coeffs, float)

    @property
    def value(self) -> float:
        return float(self.c[0])

    def derivative(self, alpha) -> float:
        """Partial derivative d^alpha f at the point (alpha a multi-index tuple)."""
        idx = self.space.index[tuple(alpha)]
        return float(self.c[idx] * self.space.factorial[idx])

    # ---- ring operations ----------------------------------------------

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        if isinstance(other, _SCALAR):
            return None
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] += float(other)
            return Jet(self.space, c)
        return Jet(self.space, self.c + o.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] -= float(other)
            return Jet(self.space, c)
        return Jet(self.space, self.c - o.c)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c * float(other))
        return Jet(self.space, self.space.mul(self.c, o.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c / float(other))
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            p = int(p)
            if p < 0:
                return self.reciprocal() ** (-p)
            out = self.space.constant(1.0)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        if isinstance(p, _SCALAR):
            v = self.value
            if v <= 0.0:
                raise ValueError("fractional power of a non-positive jet value")
            coef = 1.0
            d = []
            for k in range(self.space.order + 1):
                d.append(coef * v ** (float(p) - k))
                coef *= (float(p) - k) / (k + 1)
            return self._compose(d)
        return NotImplemented

    # ---- smooth functions ----------------------------------------------

    def _compose(self, d):
        """Evaluate sum_k d[k] (x - x0)^k by Horner, d[k] = h^(k)(x0)/k!."""
        sp = self.space
        u = self.c.copy()
        u[0] = 0.0
        r = np.zeros(sp.ncoeff)
        r[0] = d[sp.order]
        for k in range(sp.order - 1, -1, -1):
            r = sp.mul(r, u)
            r[0] += d[k]
        return Jet(sp, r)

    def reciprocal(self):
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("division by a jet with zero value part")
        d = [(-1.0) ** k / v ** (k + 1) for k in range(self.space.order + 1)]
        return self._compose(d)

    def exp(self):
        e = math.exp(self.value)
        d = [e / math.factorial(k) for k in range(self.space.order + 1)]
        return self._compose(d)

    def log(self):
        v = self.value
        if v <= 0.0:
            raise ValueError("log of a non-positive jet value")
        d = [math.log(v)]
        d += [(-1.0) ** (k - 1) / (k * v**k) for k in range(1, self.space.order + 1)]
        return self._compose(d)

    def sqrt(self):
        return self ** 0.5

    def sin(self):
        v = self.value
        cyc = [math.sin(v), math.cos(v), -math.sin(v), -math.cos(v)]
        d = [cyc[k % 4] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._compose(d)

    def cos(self):
        v = self.value
        cyc = [math.cos(v), -math.sin(v), -math.cos(v), math.sin(v)]
        d = [cyc[k % 4] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._compose(d)

    def tan(self):
        return self.sin() / self.cos()

    def __repr__(self):
        return f"Jet(value={self.value:.6g}, order={self.space.order})"


def _unary(name, fallback):
    def fn(x):
        if isinstance(x, Jet):
            return getattr(x, name)()
        return fallback(x)

    fn.__name__ = name
    fn.__doc__ = f"{name} of a Jet or a plain number."
    return fn


sin = _unary("sin", math.sin)
cos = _unary("cos", math.cos)
tan = _unary("tan", math.tan)
exp = _unary("exp", math.exp)
log = _unary("log", math.log)
sqrt = _unary("sqrt", math.sqrt)

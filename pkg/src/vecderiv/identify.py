"""Derivative vectors, differential identification and the algebra rules.

A function f: R^d -> R^p has its order-r derivative stored flat: p stacked
blocks of length d**r, block k holding every order-r mixed partial of
component k in Kronecker-power order.  Identification maps the coefficient
vector of an r-th order differential to this derivative vector (unique after
symmetrization); on top of that sit the constant-multiplication rule, the
general Leibniz rule for Kronecker products of functions, and the chain rule
for compositions, whose summands are indexed by the solutions of the linear
Diophantine equation 1*m_1 + 2*m_2 + ... + r*m_r = r.
"""

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable

import numpy as np

from .errors import MissingOrder, ShapeError, UnknownKind
from .linalg import check_entries, vec_kron_power
from .symmetrizer import symmetrize, symmetrize_blocks


@dataclass(frozen=True)
class DerivVec:
    """Order-r derivative of a function R^d -> R^p at a point, stored flat.

    data has length p * d**r: p blocks of d**r entries each.
    """

    d: int
    p: int
    r: int
    point: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float).reshape(-1)
        data = np.asarray(self.data, dtype=float).reshape(-1)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "data", data)
        if point.size != self.d:
            raise ShapeError(f"point length {point.size} != d={self.d}")
        if data.size != self.p * self.d**self.r:
            raise ShapeError(
                f"data length {data.size} != {self.p}*{self.d}**{self.r}"
            )

    def blocks(self):
        """View as a (p, d**r) array, one row per component function."""
        return self.data.reshape(self.p, self.d**self.r)

    def block(self, k):
        return self.blocks()[k]

    def symmetrized(self):
        return DerivVec(
            self.d,
            self.p,
            self.r,
            self.point,
            symmetrize_blocks(self.data, self.p, self.d, self.r),
        )

    def symmetry_defect(self):
        """Max-norm distance between data and its blockwise symmetrization."""
        return float(np.max(np.abs(self.data - self.symmetrized().data), initial=0.0))


@dataclass(frozen=True)
class Jet:
    """Value plus derivative vectors of orders 1..max_order for one function.

    deriv_fn(order, x) must return the flat derivative data of length
    p * d**order.  Order 0 is served by value_fn.
    """

    d: int
    p: int
    max_order: int
    value_fn: Callable[[np.ndarray], np.ndarray]
    deriv_fn: Callable[[int, np.ndarray], np.ndarray]

    def value(self, x):
        out = np.asarray(self.value_fn(np.asarray(x, dtype=float)), dtype=float)
        return out.reshape(-1)

    def deriv(self, order, x):
        """DerivVec of the requested order at x; MissingOrder beyond max_order."""
        if order < 0 or order > self.max_order:
            raise MissingOrder(f"jet supplies orders 0..{self.max_order}, not {order}")
        x = np.asarray(x, dtype=float).reshape(-1)
        data = self.value(x) if order == 0 else self.deriv_fn(order, x)
        return DerivVec(self.d, self.p, order, x, data)


def jet_from_callables(d, p, max_order, value_fn, deriv_fn):
    return Jet(d=d, p=p, max_order=max_order, value_fn=value_fn, deriv_fn=deriv_fn)


def differential_eval(dv, u):
    """Evaluate the r-th differential {I_p ⊗ (uᵀ)^{⊗r}} · dv at increment u.

    Returns the p-vector of blockwise contractions block_k · u^{⊗r}.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size != dv.d:
        raise ShapeError(f"increment length {u.size} != d={dv.d}")
    up = vec_kron_power(u, dv.r)
    return dv.blocks() @ up


def identify_scalar(a, d, r, point):
    """Identify D^{⊗r}f(c) = S_{d,r} a from dʳf(c;u) = aᵀ u^{⊗r} (scalar f)."""
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.size != d**r:
        raise ShapeError(f"coefficient length {a.size} != {d}**{r}")
    return DerivVec(d, 1, r, point, symmetrize(a, d, r))


def identify_vector(a, d, p, r, point):
    """Identify D^{⊗r}f(c) = (I_p ⊗ S_{d,r}) a for vector-valued f.

    a is the vec of the d**r-by-p coefficient matrix, i.e. p stacked
    d**r-blocks; each block is symmetrized independently.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.size != p * d**r:
        raise ShapeError(f"coefficient length {a.size} != {p}*{d}**{r}")
    return DerivVec(d, p, r, point, symmetrize_blocks(a, p, d, r))


def identify_iterative(b_mat, prior):
    """Identify D^{⊗r}f(c) = vec B from the first differential of D^{⊗(r-1)}f.

    B is d-by-(p d**(r-1)) with d{D^{⊗(r-1)}f}(c;u) = Bᵀu; no symmetrization
    is applied — the column stacking itself produces the derivative layout.
    """
    b = np.asarray(b_mat, dtype=float)
    d, p, r = prior.d, prior.p, prior.r + 1
    if b.shape != (d, p * d ** (r - 1)):
        raise ShapeError(
            f"B has shape {b.shape}, expected ({d}, {p * d ** (r - 1)})"
        )
    return DerivVec(d, p, r, prior.point, b.reshape(-1, order="F"))


def table1_identify(a, r, func_shape, var_shape, point=None):
    """Dispatch the identification for scalar/vector/matrix functions and variables.

    func_shape: () scalar, (p,) vector, (p, q) matrix-valued (pre-vectorized).
    var_shape:  () scalar, (d,) vector, (c, d) matrix variable (vectorized).
    Matrix variables use the symmetrizer of dimension c*d; matrix functions
    contribute p*q stacked blocks.
    """
    for name, shape in (("function", func_shape), ("variable", var_shape)):
        if not isinstance(shape, tuple) or len(shape) > 2:
            raise UnknownKind(f"{name} shape descriptor {shape!r} not recognized")
        if any((not isinstance(s, int)) or s < 1 for s in shape):
            raise UnknownKind(f"{name} shape descriptor {shape!r} not recognized")
    p_eff = math.prod(func_shape) if func_shape else 1
    d_eff = math.prod(var_shape) if var_shape else 1
    if point is None:
        point = np.zeros(d_eff)
    return identify_vector(a, d_eff, p_eff, r, point)


def const_mul(a, f_jet, r, point):
    """Derivative of a constant multiple: a ⊗ f for 1-d a, A·f for 2-d A.

    1-d a of length q:  D^{⊗r}(a ⊗ f) = a ⊗ D^{⊗r}f  (covers scalar f since
    a⊗f = a·f when p = 1).  2-d A (q-by-p):  D^{⊗r}(A f) = (A ⊗ I) D^{⊗r}f,
    i.e. A applied across the p blocks.
    """
    a = np.asarray(a, dtype=float)
    dv = f_jet.deriv(r, point)
    if a.ndim == 1:
        data = np.kron(a, dv.data)
        return DerivVec(dv.d, a.size * dv.p, r, dv.point, data)
    if a.ndim == 2:
        if a.shape[1] != dv.p:
            raise ShapeError(f"matrix has {a.shape[1]} columns, function has p={dv.p}")
        data = (a @ dv.blocks()).reshape(-1)
        return DerivVec(dv.d, a.shape[0], r, dv.point, data)
    raise ShapeError("constant must be a vector or a matrix")


def _unvec(flat, m, n):
    # vec^{-1}_{m,n}: p stacked m-blocks -> m-by-n with block k as column k
    return np.asarray(flat, dtype=float).reshape(n, m).T


def leibniz(f_jet, g_jet, r, point):
    """Derivative of the Kronecker product f ⊗ g (ordinary product when p=q=1).

    D^{⊗r}(f⊗g) = (I_pq ⊗ S_{d,r}) Σ_j C(r,j) vec{vec⁻¹D^{⊗r-j}f ⊗ vec⁻¹D^{⊗j}g};
    the symmetrizer is applied once to the accumulated sum.
    """
    if f_jet.d != g_jet.d:
        raise ShapeError("factors must share the domain dimension")
    d, p, q = f_jet.d, f_jet.p, g_jet.p
    check_entries(p * q * d**r, "Leibniz derivative")
    acc = np.zeros(p * q * d**r)
    for j in range(r + 1):
        fd = f_jet.deriv(r - j, point).data
        gd = g_jet.deriv(j, point).data
        fm = _unvec(fd, d ** (r - j), p)
        gm = _unvec(gd, d**j, q)
        acc += math.comb(r, j) * np.kron(fm, gm).reshape(-1, order="F")
    return DerivVec(d, p * q, r, point, symmetrize_blocks(acc, p * q, d, r))


def _leibniz_commutation(f_jet, g_jet, r, point):
    # Equivalent path: each summand as (I_p ⊗ K_{q,d^{r-j}} ⊗ I_{d^j})(Df ⊗ Dg),
    # with the commutation matrix realized as an axis swap.
    d, p, q = f_jet.d, f_jet.p, g_jet.p
    acc = np.zeros(p * q * d**r)
    for j in range(r + 1):
        fd = f_jet.deriv(r - j, point).data
        gd = g_jet.deriv(j, point).data
        w = np.kron(fd, gd).reshape(p, d ** (r - j), q, d**j)
        acc += math.comb(r, j) * w.transpose(0, 2, 1, 3).reshape(-1)
    return DerivVec(d, p * q, r, point, symmetrize_blocks(acc, p * q, d, r))


@dataclass(frozen=True)
class DiophTerm:
    """One solution m of 1*m_1 + ... + r*m_r = r with its chain-rule coefficient.

    pi = r! / prod_l [m_l! (l!)^{m_l}], an exact positive integer.
    """

    m: tuple
    modulus: int = field(init=False)
    pi: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "modulus", sum(self.m))
        r = sum(l * ml for l, ml in enumerate(self.m, start=1))
        pi = math.factorial(r)
        for l, ml in enumerate(self.m, start=1):
            pi //= math.factorial(ml) * math.factorial(l) ** ml
        object.__setattr__(self, "pi", pi)


def enumerate_diophantine(r):
    """All non-negative solutions of 1*m_1 + 2*m_2 + ... + r*m_r = r.

    Complete and duplicate-free; ordered by decreasing modulus, then
    lexicographically.  One solution per integer partition of r.
    """
    if r < 1:
        raise ShapeError("order must be at least 1")

    solutions = []

    def descend(l, remaining, m):
        if l == 0:
            if remaining == 0:
                solutions.append(DiophTerm(m=tuple(m)))
            return
        for ml in range(remaining // l + 1):
            m[l - 1] = ml
            descend(l - 1, remaining - l * ml, m)
        m[l - 1] = 0

    descend(r, r, [0] * r)
    solutions.sort(key=lambda t: (-t.modulus, t.m))
    return solutions


def faa_di_bruno(f_jet, g_jet, r, point):
    """Derivative of the composition g∘f at point, f: R^d->R^p, g: R^p->R^q.

    Sums over the Diophantine solutions m:
        Σ_m π_m ([vec⁻¹ D^{⊗|m|}g{f(c)}]ᵀ ⊗ S_{d,r}) ⊗_l {D^{⊗l}f(c)}^{⊗m_l}
    The inner-factor Kronecker chains reuse one derivative list for f, and the
    symmetrizer acts blockwise on the accumulated result.
    """
    if g_jet.d != f_jet.p:
        raise ShapeError(
            f"composition mismatch: inner codomain {f_jet.p}, outer domain {g_jet.d}"
        )
    d, p, q = f_jet.d, f_jet.p, g_jet.p
    point = np.asarray(point, dtype=float).reshape(-1)
    inner_value = f_jet.value(point)
    if r == 0:
        return DerivVec(d, q, 0, point, g_jet.value(inner_value))
    check_entries(q * d**r, "composition derivative")

    # Factor l enters the Kronecker chain in its (p, d**l) matrix form, so the
    # chain collects all component axes in front of all index axes (the
    # grouping the identification step needs; for p = 1 this is the plain
    # vector chain).
    f_derivs = [None] + [
        f_jet.deriv(l, point).data.reshape(p, d**l) for l in range(1, r + 1)
    ]
    g_derivs = {}
    acc = np.zeros((q, d**r))
    for term in enumerate_diophantine(r):
        k = term.modulus
        if k not in g_derivs:
            # vec^{-1}_{p^k,q} transposed: row i is component i's block
            g_derivs[k] = g_jet.deriv(k, inner_value).data.reshape(q, p**k)
        factors = []
        for l, ml in enumerate(term.m, start=1):
            factors.extend([f_derivs[l]] * ml)
        chain = reduce(np.kron, factors)  # (p**k, d**r)
        acc += term.pi * (g_derivs[k] @ chain)
    data = symmetrize_blocks(acc.reshape(-1), q, d, r)
    return DerivVec(d, q, r, point, data)

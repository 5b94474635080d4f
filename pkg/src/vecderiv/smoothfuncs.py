"""Closed-form jets for smooth test functions.

Every derivative here is analytic, making these jets independent references
for the finite-difference, Taylor and chain-rule checks (and the inputs the
self-check suites drive through the machinery).
"""

import math

import numpy as np

from .errors import ShapeError
from .identify import Jet
from .linalg import vec, vec_kron_power


def exp_affine_jet(a, shift=0.0, scale=1.0, max_order=16):
    """f(x) = scale * exp(aᵀx + shift); D^{⊗r}f = f(x) a^{⊗r}."""
    a = np.asarray(a, dtype=float).reshape(-1)

    def value(x):
        return np.array([scale * math.exp(float(a @ x) + shift)])

    def deriv(order, x):
        return value(x)[0] * vec_kron_power(a, order)

    return Jet(d=a.size, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


def sinusoid_jet(a, phase=0.0, max_order=16):
    """f(x) = sin(aᵀx + phase); D^{⊗r}f = sin(aᵀx + phase + rπ/2) a^{⊗r}."""
    a = np.asarray(a, dtype=float).reshape(-1)

    def value(x):
        return np.array([math.sin(float(a @ x) + phase)])

    def deriv(order, x):
        s = math.sin(float(a @ x) + phase + order * math.pi / 2.0)
        return s * vec_kron_power(a, order)

    return Jet(d=a.size, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


def affine_power_jet(b, n, shift=0.0, max_order=16):
    """f(x) = (bᵀx + shift)**n; D^{⊗r}f = n!/(n-r)! (bᵀx+shift)^{n-r} b^{⊗r}."""
    b = np.asarray(b, dtype=float).reshape(-1)

    def value(x):
        return np.array([(float(b @ x) + shift) ** n])

    def deriv(order, x):
        if order > n:
            return np.zeros(b.size**order)
        u = float(b @ x) + shift
        coeff = math.perm(n, order) * u ** (n - order)
        return coeff * vec_kron_power(b, order)

    return Jet(d=b.size, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


def reciprocal_affine_jet(b, shift, max_order=16):
    """f(x) = 1/(shift + bᵀx); D^{⊗r}f = (-1)^r r! (shift + bᵀx)^{-(r+1)} b^{⊗r}."""
    b = np.asarray(b, dtype=float).reshape(-1)

    def value(x):
        return np.array([1.0 / (shift + float(b @ x))])

    def deriv(order, x):
        u = shift + float(b @ x)
        coeff = (-1) ** order * math.factorial(order) / u ** (order + 1)
        return coeff * vec_kron_power(b, order)

    return Jet(d=b.size, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


def quadratic_jet(a_mat, b=None, c=0.0, max_order=16):
    """f(x) = xᵀAx + bᵀx + c; D = (A+Aᵀ)x + b, D^{⊗2} = vec(A+Aᵀ), zero beyond."""
    a_mat = np.atleast_2d(np.asarray(a_mat, dtype=float))
    d = a_mat.shape[0]
    if a_mat.shape != (d, d):
        raise ShapeError("quadratic form needs a square matrix")
    b = np.zeros(d) if b is None else np.asarray(b, dtype=float).reshape(-1)
    sym2 = a_mat + a_mat.T

    def value(x):
        return np.array([float(x @ a_mat @ x) + float(b @ x) + c])

    def deriv(order, x):
        if order == 1:
            return sym2 @ x + b
        if order == 2:
            return vec(sym2)
        return np.zeros(d**order)

    return Jet(d=d, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


def linear_map_jet(m_mat, max_order=16):
    """f(x) = Mx (R^d -> R^p); Df stacks the rows of M, higher orders vanish."""
    m_mat = np.atleast_2d(np.asarray(m_mat, dtype=float))
    p, d = m_mat.shape

    def value(x):
        return m_mat @ x

    def deriv(order, x):
        if order == 1:
            return m_mat.reshape(-1)
        return np.zeros(p * d**order)

    return Jet(d=d, p=p, max_order=max_order, value_fn=value, deriv_fn=deriv)


def constant_jet(values, d, max_order=16):
    """Constant vector function on R^d."""
    values = np.asarray(values, dtype=float).reshape(-1)

    def value(x):
        return values.copy()

    def deriv(order, x):
        return np.zeros(values.size * d**order)

    return Jet(d=d, p=values.size, max_order=max_order, value_fn=value, deriv_fn=deriv)


def stack_jets(jets):
    """Combine scalar/vector jets on a common domain into one vector jet."""
    d = jets[0].d
    if any(j.d != d for j in jets):
        raise ShapeError("stacked jets must share the domain dimension")
    p = sum(j.p for j in jets)
    max_order = min(j.max_order for j in jets)

    def value(x):
        return np.concatenate([j.value(x) for j in jets])

    def deriv(order, x):
        return np.concatenate([j.deriv(order, x).data for j in jets])

    return Jet(d=d, p=p, max_order=max_order, value_fn=value, deriv_fn=deriv)


def sum_jets(jets):
    """Pointwise sum of jets with identical (d, p)."""
    d, p = jets[0].d, jets[0].p
    if any(j.d != d or j.p != p for j in jets):
        raise ShapeError("summed jets must share (d, p)")
    max_order = min(j.max_order for j in jets)

    def value(x):
        return sum(j.value(x) for j in jets)

    def deriv(order, x):
        return sum(j.deriv(order, x).data for j in jets)

    return Jet(d=d, p=p, max_order=max_order, value_fn=value, deriv_fn=deriv)


def as_function(jet):
    """Plain point-evaluation callable of a jet (for the FD oracle)."""

    def f(x):
        return jet.value(x)

    return f

"""Gaussian density derivatives, vector Hermite polynomials, moments and cumulants.

The density derivative of any order comes out of three routes that share no
code path: a closed form built on vector Hermite polynomials, the chain rule
applied to the exp/quadratic decomposition, and (up to order 3) column
stacking of hand-derived differential coefficient matrices.  Their agreement
is the module's main correctness witness.
"""

import math

import numpy as np

from .errors import MissingOrder, NotSpd, ShapeError, UnsupportedOrder
from .identify import DerivVec, Jet, faa_di_bruno, identify_iterative
from .linalg import commutation_matrix, kron_matvec_power, vec, vec_kron_power
from .symmetrizer import symmetrize

# Exact integer Hermite/chain coefficients stay exactly representable in a
# double up to this bound.
_EXACT_FLOAT = 1 << 53


def _exact_coeff(r, j):
    c = math.factorial(r) // (
        math.factorial(j) * math.factorial(r - 2 * j) * 2**j
    )
    if c >= _EXACT_FLOAT:
        raise UnsupportedOrder(f"coefficient at order {r} overflows exact float range")
    return c


class SpdMatrix:
    """A symmetric positive-definite matrix with cached inverse and determinant.

    Validated on construction (symmetry within tol, Cholesky succeeds); the
    cached pieces are immutable afterwards, so instances are safe to share.
    """

    def __init__(self, mat, tol=1e-12):
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        if mat.shape[0] != mat.shape[1]:
            raise NotSpd(f"matrix is {mat.shape[0]}x{mat.shape[1]}, not square")
        scale = max(np.max(np.abs(mat)), 1.0)
        if np.max(np.abs(mat - mat.T)) > tol * scale:
            raise NotSpd("matrix is not symmetric")
        try:
            chol = np.linalg.cholesky((mat + mat.T) / 2.0)
        except np.linalg.LinAlgError as exc:
            raise NotSpd("matrix is not positive definite") from exc
        self._mat = (mat + mat.T) / 2.0
        self._mat.flags.writeable = False
        self._chol = chol
        self._inv = np.linalg.inv(self._mat)
        self._inv = (self._inv + self._inv.T) / 2.0
        self._inv.flags.writeable = False
        self._logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))

    @property
    def d(self):
        return self._mat.shape[0]

    @property
    def mat(self):
        return self._mat

    @property
    def inv(self):
        return self._inv

    @property
    def logdet(self):
        return self._logdet

    def sqrtm(self):
        """Symmetric square root, via eigendecomposition."""
        w, v = np.linalg.eigh(self._mat)
        return (v * np.sqrt(w)) @ v.T

    def __repr__(self):
        return f"SpdMatrix(d={self.d})"


def as_spd(sigma):
    return sigma if isinstance(sigma, SpdMatrix) else SpdMatrix(sigma)


def gaussian_density(x, sigma):
    """Density of N(0, sigma) at x: (2π)^{-d/2} |Σ|^{-1/2} exp(-xᵀΣ⁻¹x/2)."""
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != sigma.d:
        raise ShapeError(f"point length {x.size} != d={sigma.d}")
    quad = float(x @ sigma.inv @ x)
    return math.exp(-0.5 * (sigma.d * math.log(2 * math.pi) + sigma.logdet + quad))


def hermite_vector(r, x, sigma):
    """Order-r vector Hermite polynomial H_r(x; Σ) of length d**r.

    H_r = r! Σ_{j=0}^{⌊r/2⌋} (-1)^j / (j!(r-2j)!2^j) S_{d,r}{x^{⊗r-2j} ⊗ (vecΣ)^{⊗j}};
    the integer coefficients are computed exactly, the symmetrizer is applied
    once to the accumulated sum.  H_0 = 1 and H_1 = x.
    """
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = sigma.d
    if x.size != d:
        raise ShapeError(f"point length {x.size} != d={d}")
    if r == 0:
        return np.ones(1)
    vs = vec(sigma.mat)
    acc = np.zeros(d**r)
    for j in range(r // 2 + 1):
        term = np.kron(vec_kron_power(x, r - 2 * j), vec_kron_power(vs, j))
        acc += (-1) ** j * _exact_coeff(r, j) * term
    return symmetrize(acc, d, r)


def gaussian_deriv_hermite(r, x, sigma):
    """D^{⊗r} of the N(0,Σ) density via (-1)^r (Σ⁻¹)^{⊗r} H_r(x;Σ) φ_Σ(x)."""
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    h = hermite_vector(r, x, sigma)
    data = (-1) ** r * gaussian_density(x, sigma) * kron_matvec_power(
        sigma.inv, h, r
    )
    return DerivVec(sigma.d, 1, r, x, data)


def gaussian_log_quad_jet(sigma):
    """Jet of f(x) = -xᵀΣ⁻¹x/2: Df = -Σ⁻¹x, D^{⊗2}f = -vecΣ⁻¹, zero beyond."""
    sigma = as_spd(sigma)
    d = sigma.d

    def value(x):
        return np.array([-0.5 * float(x @ sigma.inv @ x)])

    def deriv(order, x):
        if order == 1:
            return -sigma.inv @ x
        if order == 2:
            return -vec(sigma.inv)
        return np.zeros(d**order)

    return Jet(d=d, p=1, max_order=64, value_fn=value, deriv_fn=deriv)


def scaled_exp_jet(log_scale):
    """Jet of g(y) = exp(log_scale)·exp(y) on R: every derivative equals g."""

    def value(y):
        return np.array([math.exp(log_scale + float(y[0]))])

    def deriv(order, y):
        return value(y)

    return Jet(d=1, p=1, max_order=64, value_fn=value, deriv_fn=deriv)


def gaussian_deriv_fdb(r, x, sigma):
    """D^{⊗r} of the N(0,Σ) density via the chain rule on exp ∘ (-xᵀΣ⁻¹x/2)."""
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    if r == 0:
        return DerivVec(sigma.d, 1, 0, x, np.array([gaussian_density(x, sigma)]))
    log_scale = -0.5 * (sigma.d * math.log(2 * math.pi) + sigma.logdet)
    return faa_di_bruno(gaussian_log_quad_jet(sigma), scaled_exp_jet(log_scale), r, x)


def gaussian_deriv_iterative(r, x, sigma):
    """D^{⊗r} of the N(0,Σ) density for r ≤ 3, by stacked differential coefficients.

    Order 1 is the closed form -φ Σ⁻¹x; orders 2 and 3 stack the hand-derived
    coefficient matrix B of the first differential of the previous derivative
    (column stacking only, no symmetrizer involved).
    """
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = sigma.d
    if r not in (1, 2, 3):
        raise UnsupportedOrder(f"iterative path covers orders 1..3, not {r}")
    phi = gaussian_density(x, sigma)
    six = sigma.inv @ x
    dv1 = DerivVec(d, 1, 1, x, -phi * six)
    if r == 1:
        return dv1
    b2 = phi * (np.outer(six, six) - sigma.inv)
    dv2 = identify_iterative(b2, dv1)
    if r == 2:
        return dv2
    col = six.reshape(-1, 1)
    m = (
        np.outer(np.kron(six, six) - vec(sigma.inv), six)
        - np.kron(sigma.inv, col)
        - np.kron(col, sigma.inv)
    )
    return identify_iterative(-phi * m.T, dv2)


def gaussian_deriv_expanded3(x, sigma):
    """Third derivative by the expanded commutation-matrix display.

    -φ {(Σ⁻¹x)^{⊗3} - vecΣ⁻¹ ⊗ Σ⁻¹x - (I_d ⊗ K_dd)(vecΣ⁻¹ ⊗ Σ⁻¹x) - Σ⁻¹x ⊗ vecΣ⁻¹};
    used as a cross-check of the iterative path.
    """
    sigma = as_spd(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = sigma.d
    phi = gaussian_density(x, sigma)
    six = sigma.inv @ x
    vs = vec(sigma.inv)
    kd = commutation_matrix(d, d)
    data = -phi * (
        vec_kron_power(six, 3)
        - np.kron(vs, six)
        - np.kron(np.eye(d), kd) @ np.kron(vs, six)
        - np.kron(six, vs)
    )
    return DerivVec(d, 1, 3, x, data)


def gaussian_jet(sigma, max_order=16):
    """Jet of the N(0,Σ) density, served by the Hermite-form derivatives."""
    sigma = as_spd(sigma)

    def value(x):
        return np.array([gaussian_density(x, sigma)])

    def deriv(order, x):
        return gaussian_deriv_hermite(order, x, sigma).data

    return Jet(d=sigma.d, p=1, max_order=max_order, value_fn=value, deriv_fn=deriv)


class _OrderedVectors:
    """Common storage for per-order symmetric vectors kappa_l / mu_l."""

    def __init__(self, d, vectors):
        self.d = d
        self._vectors = []
        for order, v in enumerate(vectors, start=1):
            v = np.asarray(v, dtype=float).reshape(-1)
            if v.size != d**order:
                raise ShapeError(
                    f"order-{order} vector has length {v.size}, expected {d}**{order}"
                )
            self._vectors.append(symmetrize(v, d, order))

    @property
    def max_order(self):
        return len(self._vectors)

    def get(self, order):
        if not 1 <= order <= len(self._vectors):
            raise MissingOrder(f"order {order} not supplied (have 1..{len(self._vectors)})")
        return self._vectors[order - 1]


class CumulantSet(_OrderedVectors):
    """Vectorized cumulants kappa_1..kappa_r, symmetrized on construction."""


class MomentSet(_OrderedVectors):
    """Vectorized moments mu_1..mu_r (mu_0 = 1 implicit), symmetrized on construction."""

    def get(self, order):
        if order == 0:
            return np.ones(1)
        return super().get(order)


def _dioph_sum(vectors_by_order, d, r, weight):
    from .identify import enumerate_diophantine

    acc = np.zeros(d**r)
    for term in enumerate_diophantine(r):
        factors = []
        for l, ml in enumerate(term.m, start=1):
            factors.extend([vectors_by_order(l)] * ml)
        chain = factors[0]
        for f in factors[1:]:
            chain = np.kron(chain, f)
        acc += weight(term) * chain
    return symmetrize(acc, d, r)


def moments_from_cumulants(cumulants, r):
    """mu_r = Σ_{m} π_m S_{d,r} ⊗_l kappa_l^{⊗m_l} from cumulants of orders 1..r."""
    return _dioph_sum(cumulants.get, cumulants.d, r, lambda t: float(t.pi))


def cumulants_from_moments(moments, r):
    """kappa_r = Σ_{m} π_m (-1)^{|m|-1} (|m|-1)! S_{d,r} ⊗_l mu_l^{⊗m_l}."""
    return _dioph_sum(
        moments.get,
        moments.d,
        r,
        lambda t: float(t.pi) * (-1) ** (t.modulus - 1) * math.factorial(t.modulus - 1),
    )


def gaussian_mgf_moments(r, sigma, mean=None):
    """Moment vector E(X^{⊗r}) of X ~ N(mean, Σ) as the MGF derivative at zero.

    The MGF exp(meanᵀt + tᵀΣt/2) is differentiated through the chain rule,
    which is an independent route to the same moments as the
    cumulant-conversion formula.
    """
    sigma = as_spd(sigma)
    d = sigma.d
    mean = np.zeros(d) if mean is None else np.asarray(mean, dtype=float).reshape(-1)
    if mean.size != d:
        raise ShapeError(f"mean length {mean.size} != d={d}")
    if r == 0:
        return np.ones(1)

    def value(t):
        return np.array([float(mean @ t) + 0.5 * float(t @ sigma.mat @ t)])

    def deriv(order, t):
        if order == 1:
            return mean + sigma.mat @ t
        if order == 2:
            return vec(sigma.mat)
        return np.zeros(d**order)

    inner = Jet(d=d, p=1, max_order=64, value_fn=value, deriv_fn=deriv)
    return faa_di_bruno(inner, scaled_exp_jet(0.0), r, np.zeros(d)).data


def gaussian_moments(r, sigma):
    """Moment vector of the centered Gaussian N(0, Σ), via cumulant conversion."""
    sigma = as_spd(sigma)
    d = sigma.d
    if r == 0:
        return np.ones(1)
    vectors = [np.zeros(d), vec(sigma.mat)] + [np.zeros(d**l) for l in range(3, r + 1)]
    return moments_from_cumulants(CumulantSet(d, vectors[:r]), r)

"""Taylor evaluation, remainder-rate probing, mollifier bias and the FD oracle.

The finite-difference routine is the package's generic numerical witness: it
assembles every mixed partial up to order 3 from tensor products of 1-d
central stencils, Richardson-extrapolates across step halvings, and returns a
symmetric derivative vector assembled through the index/position map.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingOrder, ShapeError, StepTooSmall, UnsupportedOrder
from .gaussian import as_spd, gaussian_moments
from .identify import DerivVec, differential_eval
from .linalg import kron_matvec_power
from .symmetrizer import expand_unique, unique_layout


@dataclass(frozen=True)
class TaylorResult:
    """Taylor polynomial value at x+u together with its per-order terms."""

    approx: np.ndarray
    per_order_terms: list


def taylor_eval(jet, x, u, r):
    """Evaluate the order-r Taylor polynomial Σ_j (1/j!){I_p ⊗ (uᵀ)^{⊗j}} D^{⊗j}f(x)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if r > jet.max_order:
        raise MissingOrder(f"jet supplies orders 0..{jet.max_order}, not {r}")
    terms = []
    for j in range(r + 1):
        dv = jet.deriv(j, x)
        terms.append(differential_eval(dv, u) / math.factorial(j))
    return TaylorResult(approx=np.sum(terms, axis=0), per_order_terms=terms)


@dataclass(frozen=True)
class RemainderReport:
    """Decay of the Taylor remainder along shrinking increments.

    ratios[k] = ||R(t_k u)|| / ||t_k u||^r; slope is the log-log fit of
    ||R(t u)|| against t (NaN when the remainder sits at rounding level).
    """

    scales: np.ndarray
    ratios: np.ndarray
    slope: float


def remainder_rate(jet, x, u, r, n_scales=8):
    """Measure how fast f(x+tu) minus the order-r Taylor polynomial decays in t."""
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    scales = 0.5 ** np.arange(1, n_scales + 1)
    unorm = float(np.linalg.norm(u))
    ref = max(1.0, float(np.linalg.norm(jet.value(x))))
    rnorms = np.empty(n_scales)
    ratios = np.empty(n_scales)
    for k, t in enumerate(scales):
        ut = t * u
        rem = jet.value(x + ut) - taylor_eval(jet, x, ut, r).approx
        rnorms[k] = float(np.linalg.norm(rem))
        ratios[k] = rnorms[k] / (t * unorm) ** r
    usable = rnorms > 1e-13 * ref
    if np.count_nonzero(usable) >= 2:
        slope = float(np.polyfit(np.log(scales[usable]), np.log(rnorms[usable]), 1)[0])
    else:
        slope = float("nan")
    return RemainderReport(scales=scales, ratios=ratios, slope=slope)


def gaussian_kernel_moment(d, order):
    """Vectorized moment mu_order of the standard d-variate Gaussian kernel."""
    return gaussian_moments(order, np.eye(d))


def mollifier_leading_term(deriv2k, h_mat, kernel_moment):
    """Leading smoothing bias (1/(2k)!) D^{⊗2k}f(x)ᵀ (H^{1/2})^{⊗2k} mu_{2k}(K).

    deriv2k is the order-2k derivative vector of the target (scalar) function,
    h_mat the SPD bandwidth and kernel_moment the order-2k kernel moment.
    """
    if deriv2k.p != 1:
        raise ShapeError("mollifier bias needs a scalar-valued function")
    if deriv2k.r % 2 != 0 or deriv2k.r == 0:
        raise ShapeError(f"derivative order {deriv2k.r} is not a positive even order")
    h_mat = as_spd(h_mat)
    if h_mat.d != deriv2k.d:
        raise ShapeError("bandwidth dimension does not match the derivative")
    mu = np.asarray(kernel_moment, dtype=float).reshape(-1)
    if mu.size != deriv2k.d**deriv2k.r:
        raise ShapeError(f"kernel moment length {mu.size} != d**{deriv2k.r}")
    weighted = kron_matvec_power(h_mat.sqrtm(), mu, deriv2k.r)
    return float(deriv2k.data @ weighted) / math.factorial(deriv2k.r)


@dataclass(frozen=True)
class FdConfig:
    """Central-difference settings: base step (None = automatic) and Richardson depth."""

    step: float | None = None
    scheme: str = "central"
    richardson_levels: int = 1


# 1-d central stencils (offset, weight); weights are in units of h**-order and
# all carry an even-power error expansion, so Richardson steps gain h**2 each.
_STENCILS = {
    1: ((-1.0, -0.5), (1.0, 0.5)),
    2: ((-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)),
    3: ((-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)),
}

# Relative disagreement between the two finest step levels beyond which the
# estimate is considered cancellation-dominated.
_INSTABILITY_TOL = 0.5


class _FdEvaluator:
    """Memoizes f over the integer offset lattice of one step size."""

    def __init__(self, f, x, h):
        self.f, self.x, self.h = f, x, h
        self.cache = {}

    def __call__(self, steps):
        key = tuple(steps)
        if key not in self.cache:
            point = self.x + self.h * np.asarray(steps, dtype=float)
            self.cache[key] = np.atleast_1d(np.asarray(self.f(point), dtype=float))
        return self.cache[key]


def _unique_partials(f, x, d, r, h, layout):
    """All canonical mixed partials at step h, one (p,)-vector per unique index."""
    evaluate = _FdEvaluator(f, x, h)
    out = []
    for indices in layout.canonical_list:
        per_var = [(v - 1, indices.count(v)) for v in sorted(set(indices))]
        stencils = [_STENCILS[k] for _, k in per_var]
        total = None
        for combo in itertools.product(*stencils):
            steps = [0] * d
            weight = 1.0
            for (var, _), (offset, w) in zip(per_var, combo):
                steps[var] = offset
                weight *= w
            term = weight * evaluate(steps)
            total = term if total is None else total + term
        out.append(total / h**r)
    return np.asarray(out)


def fd_derivative_vector(f, x, r, cfg=None):
    """Central-difference estimate of D^{⊗r}f(x) for r ≤ 3, symmetrized.

    Computes only the unique mixed partials (tensor-product stencils on the
    offset lattice), Richardson-extrapolates over cfg.richardson_levels step
    halvings, and redistributes across permutation orbits.  Raises
    StepTooSmall when the two finest levels disagree badly, which signals
    cancellation noise.  Assumes f is smooth (about C^{r+2}) near x.
    """
    cfg = cfg or FdConfig()
    if cfg.scheme != "central":
        raise UnsupportedOrder(f"unknown scheme {cfg.scheme!r}")
    if not 1 <= r <= 3:
        raise UnsupportedOrder(f"finite differences cover orders 1..3, not {r}")
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    p = np.atleast_1d(np.asarray(f(x), dtype=float)).size
    eps = np.finfo(float).eps
    h = cfg.step or eps ** (1.0 / (r + 2)) * max(1.0, float(np.max(np.abs(x))))
    layout = unique_layout(d, r)

    estimates = [
        _unique_partials(f, x, d, r, h / 2**k, layout)
        for k in range(cfg.richardson_levels + 1)
    ]
    if len(estimates) >= 2:
        spread = float(np.max(np.abs(estimates[-1] - estimates[-2])))
        scale = max(float(np.max(np.abs(estimates[-1]))), 1.0)
        if spread > _INSTABILITY_TOL * scale:
            raise StepTooSmall(
                f"estimates at h={h:g} differ by {spread:.3e} (scale {scale:.3e})"
            )
    table = estimates
    level = 0
    while len(table) > 1:
        level += 1
        gain = 4.0**level
        table = [(gain * b - a) / (gain - 1.0) for a, b in zip(table, table[1:])]
    uniques = table[0]  # (count, p)

    blocks = np.stack([expand_unique(uniques[:, i], layout) for i in range(p)])
    return DerivVec(d, p, r, x, blocks.reshape(-1))

"""Gaussian moments by the Wick formula and the L2(gamma_k) Cauchy estimate for f^k_N.

``f^k_N(psi) = (1/2pi) int psi^(k) psibar^(k-1) psibar psi`` for the truncated
field.  In coefficients it equals
``i sum n1^k m1^(k-1) conj(psi_m1) conj(psi_m2) psi_n1 psi_n2`` over
``n1 + n2 = m1 + m2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .diffpoly import PSI, DiffPoly
from .errors import MismatchedMethods
from .gibbs import sample_coeffs
from .spectral import FourierField, FunctionalEvaluator, resize_coeffs

__all__ = [
    "MomentSpec",
    "wick_moment",
    "f_density",
    "f_k_N_eval",
    "f_k_N_sum",
    "WickDistance",
    "l2_distance_analytic",
    "orbit",
    "l2_distance_mc",
    "HyperReport",
    "hypercontractivity_check",
    "hypercontractivity_from_values",
]

S4 = tuple(permutations(range(4)))


@dataclass(frozen=True)
class MomentSpec:
    ms: tuple
    ns: tuple
    k: int

    def __post_init__(self):
        if len(self.ms) != len(self.ns):
            raise ValueError("ms and ns must have equal length")


def _var(n, k):
    return 1.0 / (1.0 + abs(n) ** k) ** 2


def wick_moment(spec: MomentSpec) -> float:
    """``E[prod_j conj(psi_{m_j}) psi_{n_j}]`` as a sum over pairings."""
    ms, ns, k = spec.ms, spec.ns, spec.k
    if sorted(ms) != sorted(ns):
        return 0.0
    total = 0.0
    for sigma in permutations(range(len(ns))):
        term = 1.0
        for i, s in enumerate(sigma):
            if ms[i] != ns[s]:
                term = 0.0
                break
            term *= _var(ns[s], k)
        total += term
    return total


def f_density(k: int) -> DiffPoly:
    """``psi^(k) psibar^(k-1) psibar psi``."""
    return DiffPoly({(0, tuple(sorted([(0, k), (1, k - 1), (1, 0), (0, 0)]))): 1}, PSI)


def f_k_N_sum(coeffs, k):
    """Momentum-constrained coefficient sum and the sum of absolute terms."""
    c = np.asarray(coeffs, complex)
    N = (len(c) - 1) // 2
    n = np.arange(-N, N + 1).astype(float)
    a = n ** k * c
    b = n ** (k - 1) * c.conj()
    x = np.convolve(a, c)
    y = np.convolve(b, c.conj())
    scale = float(np.sum(np.convolve(np.abs(a), np.abs(c)) * np.convolve(np.abs(b), np.abs(c))))
    return 1j * complex(np.sum(x * y)), scale


def f_k_N_eval(field: FourierField, k: int, tol: float = 1e-10) -> complex:
    """``f^k_N`` by quadrature, cross-checked against the coefficient sum."""
    quad = complex(FunctionalEvaluator(f_density(k), field.N, 0.0)(field.coeffs))
    direct, scale = f_k_N_sum(field.coeffs, k)
    if abs(quad - direct) > tol * max(1.0, scale):
        raise MismatchedMethods(f"quadrature {quad} vs coefficient sum {direct}")
    return direct


# -- analytic L2 distance ------------------------------------------------------------

def orbit(sigma) -> int:
    """1, 2 or 3 according to how sigma moves the pair {1, 2}."""
    img = {sigma[0], sigma[1]}
    if img == {0, 1}:
        return 1
    if img == {2, 3}:
        return 3
    return 2


@dataclass(frozen=True)
class WickDistance:
    k: int
    M: int
    N: int
    total: float
    w1: float
    w2: float
    w3: float


def _weights(n, k):
    return 1.0 / (1.0 + np.abs(n).astype(float) ** k) ** 2


def _pair_sum(sigma, k, M, N):
    """Factorised 2D sum for a permutation preserving {1, 2} and {3, 4}."""
    n = np.arange(-N, N + 1)
    a, b = np.meshgrid(n, n, indexing="ij")
    mask = np.maximum(np.abs(a), np.abs(b)) > M
    w = _weights(a, k) * _weights(b, k)
    af, bf = a.astype(float), b.astype(float)
    first = af ** k * (af if sigma[0] == 0 else bf) ** (k - 1) * w
    # second factor: n3^(k-1) n_sigma(3)^k with (n3, n4) -> (a, b)
    second = af ** (k - 1) * (af if sigma[2] == 2 else bf) ** k * w
    return math.fsum(first[mask]) * math.fsum(second[mask])


def _constrained_sum(sigma, k, M, N):
    """Sum over n1..n4 in [-N, N] with n1 + n2 = n_s1 + n_s2, one variable eliminated."""
    coef = [0, 0, 0, 0]
    coef[0] += 1
    coef[1] += 1
    coef[sigma[0]] -= 1
    coef[sigma[1]] -= 1
    solve = max(i for i in range(4) if coef[i] != 0)
    free = [i for i in range(4) if i != solve]
    r = np.arange(-N, N + 1)
    grids = np.meshgrid(r, r, r, indexing="ij")
    nv = [None] * 4
    for i, g in zip(free, grids):
        nv[i] = g
    acc = np.zeros_like(grids[0])
    for i in free:
        acc = acc + coef[i] * nv[i]
    nv[solve] = -acc * coef[solve]
    valid = np.abs(nv[solve]) <= N
    m = [nv[sigma[i]] for i in range(4)]
    big12 = np.maximum.reduce([np.abs(m[0]), np.abs(m[1]), np.abs(nv[0]), np.abs(nv[1])]) > M
    big34 = np.maximum.reduce([np.abs(m[2]), np.abs(m[3]), np.abs(nv[2]), np.abs(nv[3])]) > M
    mask = valid & big12 & big34
    f = [x.astype(float) for x in nv]
    num = f[0] ** k * f[sigma[0]] ** (k - 1) * f[2] ** (k - 1) * f[sigma[2]] ** k
    den = _weights(nv[0], k) * _weights(nv[1], k) * _weights(nv[2], k) * _weights(nv[3], k)
    return math.fsum((num * den)[mask])


def l2_distance_analytic(k: int, M: int, N: int) -> WickDistance:
    """``||f^k_N - f^k_M||^2`` in ``L2(gamma_k)``, split by S_4 orbits."""
    if not 1 <= M <= N:
        raise ValueError("need 1 <= M <= N")
    parts = {1: [], 2: [], 3: []}
    if M < N:
        for sigma in S4:
            o = orbit(sigma)
            if o == 1:
                parts[1].append(_pair_sum(sigma, k, M, N))
            else:
                parts[o].append(_constrained_sum(sigma, k, M, N))
    w1, w2, w3 = (math.fsum(parts[i]) for i in (1, 2, 3))
    return WickDistance(k, M, N, math.fsum([w1, w2, w3]), w1, w2, w3)


# -- Monte Carlo ----------------------------------------------------------------------

def _f_values(coeffs, N, k, chunk=4096):
    ev = FunctionalEvaluator(f_density(k), N, 0.0)
    out = np.empty(len(coeffs), complex)
    for s in range(0, len(coeffs), chunk):
        out[s:s + chunk] = ev(coeffs[s:s + chunk])
    return out


def _mean_stderr(x):
    """Mean with its jackknife standard error (closed form for the mean)."""
    n = len(x)
    mean = float(np.mean(x))
    if n < 2:
        return mean, 0.0
    loo = (np.sum(x) - x) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return mean, se


def l2_distance_mc(k, M, N, samples, seed, workers=1):
    """Sample mean of ``|f_N - f_M|^2`` under gamma_k at truncation N."""
    if samples < 100:
        raise ValueError("samples must be at least 100")
    if M == N:
        return 0.0, 0.0
    c = sample_coeffs(k, N, samples, seed, workers)
    fN = _f_values(c, N, k)
    fM = _f_values(resize_coeffs(c, N, M), M, k)
    return _mean_stderr(np.abs(fN - fM) ** 2)


@dataclass(frozen=True)
class HyperReport:
    l4: float
    l2: float
    ratio: float
    rel_stderr: float
    bound: float
    passed: bool
    undefined: bool = False


def hypercontractivity_from_values(values, p=4, r=4) -> HyperReport:
    """``||f||_p / ||f||_2`` with a leave-one-out jackknife error."""
    a = np.abs(np.asarray(values)) ** 2
    bound = float((p - 1) ** (r / 2))
    n = len(a)
    s2 = float(np.sum(a))
    if s2 == 0.0:
        return HyperReport(0.0, 0.0, math.nan, math.nan, bound, False, True)
    ap = a ** (p / 2)
    sp = float(np.sum(ap))
    lp = (sp / n) ** (1 / p)
    l2 = math.sqrt(s2 / n)
    ratio = lp / l2
    with np.errstate(divide="ignore", invalid="ignore"):
        loo = ((sp - ap) / (n - 1)) ** (1 / p) / np.sqrt((s2 - a) / (n - 1))
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    rel = se / ratio
    return HyperReport(lp, l2, ratio, rel, bound, ratio <= bound * (1 + 5 * rel))


def hypercontractivity_check(k, N, samples, seed, workers=1) -> HyperReport:
    if samples < 10_000:
        raise ValueError("samples must be at least 10^4")
    c = sample_coeffs(k, N, samples, seed, workers)
    return hypercontractivity_from_values(_f_values(c, N, k))

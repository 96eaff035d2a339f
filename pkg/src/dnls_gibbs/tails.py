"""Tail and concentration estimates under gamma_k.

Each study draws samples, computes a scalar statistic per sample and compares
its empirical survival function with a bound of known shape whose constant is
fitted at the smallest threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LambdaBelowNet, RegularityOutOfRange
from .gibbs import mode_std, sample_coeffs
from .spectral import grid_values, modes, resize_coeffs

__all__ = [
    "SurvivalCurve",
    "survival",
    "sobolev_tail_study",
    "concentration_dichotomy",
    "ConcentrationReport",
    "quadratic_form_matrix",
    "T_k",
    "quadratic_tail_study",
    "net_threshold",
    "sup_tail_study",
    "linear_tail_study",
    "linear_T",
    "WEIGHT_NOTE",
]

WEIGHT_NOTE = "mode variances 1/(1+|n|^k)^2 (Wick convention), not 1/(1+n^(2k))"

SIGMA = 3.0


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    kind: str
    k: int
    N: int
    lambdas: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    fitted_c: float
    params: dict = field(default_factory=dict)

    @property
    def flagged(self) -> np.ndarray:
        return self.survival > self.bound + SIGMA * self.stderr

    @property
    def n_flagged(self) -> int:
        return int(np.sum(self.flagged))

    @property
    def passed(self) -> bool:
        return self.n_flagged == 0

    def rows(self):
        for i, lam in enumerate(self.lambdas):
            yield {
                "kind": self.kind, "k": self.k, "N": self.N, "lambda": float(lam),
                "survival": float(self.survival[i]), "stderr": float(self.stderr[i]),
                "bound": float(self.bound[i]), "fitted_c": self.fitted_c,
                "flagged": bool(self.flagged[i]),
            }


def survival(values, lambdas):
    """Empirical ``P(X >= lambda)`` with binomial standard errors."""
    values = np.sort(np.asarray(values, dtype=float))
    lambdas = np.asarray(lambdas, dtype=float)
    n = len(values)
    s = (n - np.searchsorted(values, lambdas, side="left")) / n
    return s, np.sqrt(s * (1 - s) / n)


def _check_grid(lambdas):
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambdas must be strictly increasing")
    return lambdas


def _curve(kind, k, N, values, lambdas, shape, params):
    """Fit ``c`` so that ``c * shape(lambda_0)`` equals the survival at lambda_0."""
    lambdas = _check_grid(lambdas)
    if len(lambdas) == 0:
        empty = np.zeros(0)
        return SurvivalCurve(kind, k, N, empty, empty, empty, empty, 0.0, params)
    s, se = survival(values, lambdas)
    sh = shape(lambdas)
    c = float(s[0] / sh[0]) if sh[0] > 0 else 0.0
    return SurvivalCurve(kind, k, N, lambdas, s, se, c * sh, c, params)


def _hdot_norms(coeffs, N, s):
    n = np.abs(modes(N)).astype(float)
    w = np.where(n > 0, n, 0.0) ** (2 * s)
    return np.sqrt(np.abs(coeffs) ** 2 @ w)


def sobolev_tail_study(k, s, N, lambdas, samples, seed, workers=1) -> SurvivalCurve:
    """Survival of ``||psi_N||_{H^s-dot}`` against ``c exp(-lambda/4)``."""
    if s >= k - 0.5:
        raise RegularityOutOfRange(f"need s < k - 1/2 = {k - 0.5}, got s = {s}")
    vals = _hdot_norms(sample_coeffs(k, N, samples, seed, workers), N, s)
    return _curve("sobolev", k, N, vals, lambdas, lambda x: np.exp(-x / 4),
                  {"s": s, "samples": samples, "seed": seed, "weights": WEIGHT_NOTE})


@dataclass(frozen=True)
class ConcentrationReport:
    k: int
    s_low: float
    s_high: float
    Ns: tuple
    medians_low: tuple
    medians_high: tuple
    low_stable: bool | None
    high_grows: bool | None
    verdict_high: str

    @property
    def passed(self):
        if self.low_stable is None:
            return True
        return bool(self.low_stable and (self.high_grows or self.verdict_high == "marginal"))


def concentration_dichotomy(k, s_low, s_high, Ns, samples, seed, tol=0.05, workers=1) -> ConcentrationReport:
    """Medians of ``||psi_N||_{H^s-dot}`` below and above the critical ``k - 1/2``.

    Samples are drawn at ``max(Ns)`` and projected, so consecutive truncations
    see the same draws.
    """
    if not s_low < k - 0.5 <= s_high:
        raise RegularityOutOfRange(f"need s_low < {k - 0.5} <= s_high")
    Ns = tuple(int(n) for n in Ns)
    top = max(Ns)
    c = sample_coeffs(k, top, samples, seed, workers)
    low, high = [], []
    for N in Ns:
        proj = resize_coeffs(c, top, N)
        low.append(float(np.median(_hdot_norms(proj, N, s_low))))
        high.append(float(np.median(_hdot_norms(proj, N, s_high))))
    if len(Ns) < 2:
        return ConcentrationReport(k, s_low, s_high, Ns, tuple(low), tuple(high), None, None, "skipped")
    low_stable = abs(low[-1] / low[-2] - 1) <= tol
    grows = all(b > a for a, b in zip(high, high[1:]))
    verdict = "marginal" if s_high == k - 0.5 else ("pass" if grows else "fail")
    return ConcentrationReport(k, s_low, s_high, Ns, tuple(low), tuple(high), low_stable, grows, verdict)


def quadratic_form_matrix(k, N, x=0.0) -> np.ndarray:
    """``Q[l, h]`` with ``psi^(k)(x) conj(psi(x)) = sum_{l,h} conj(psi_l) Q[l, h] psi_h``."""
    n = modes(N)
    col = (1j * n) ** k * np.exp(1j * n * x)
    row = np.exp(-1j * n * x)
    return np.outer(row, col)


def T_k(Q, k) -> float:
    """``sup_{l,h} |Q[l,h]| / sqrt(1 + h^(2k))``."""
    N = (Q.shape[1] - 1) // 2
    h = np.abs(modes(N)).astype(float)
    return float(np.max(np.abs(Q) / np.sqrt(1 + h ** (2 * k))[None, :]))


def quadratic_tail_study(k, N, lambdas, samples, seed, x=0.0, workers=1) -> SurvivalCurve:
    """Survival of ``|psi^(k)(x) conj(psi(x))|`` against ``c exp(-lambda / (4 T_k))``."""
    Q = quadratic_form_matrix(k, N, x)
    t = T_k(Q, k)
    c = sample_coeffs(k, N, samples, seed, workers)
    vals = np.abs(np.einsum("sl,lh,sh->s", c.conj(), Q, c))
    return _curve("quadratic_form", k, N, vals, lambdas, lambda lam: np.exp(-lam / (4 * t)),
                  {"T_k": t, "x": x, "samples": samples, "seed": seed, "weights": WEIGHT_NOTE})


def net_threshold(k, N, r0_sq):
    """``2 L_N eps^(1/2)`` with ``L_N = N^(3/2+k) R_0^2`` and ``eps = N^(-2-2k)``."""
    eps = float(N) ** (-2 - 2 * k)
    return 2 * float(N) ** (1.5 + k) * np.asarray(r0_sq) * math.sqrt(eps)


def sup_tail_study(k, N, lambdas, samples, seed, workers=1) -> SurvivalCurve:
    """Survival of ``sup_x |psi^(k) conj(psi)|`` (grid of 8N+1 points) against ``c N^(2+2k) exp(-lambda/4)``.

    ``R_0^2 = sum |psi_n|^2`` per sample.  The grid must start above the
    epsilon-net threshold of the median sample; the fraction of samples whose
    own threshold exceeds ``lambdas[0]`` is reported as ``below_net``.
    """
    lambdas = _check_grid(lambdas)
    c = sample_coeffs(k, N, samples, seed, workers)
    r0_sq = np.sum(np.abs(c) ** 2, axis=1)
    thr = net_threshold(k, N, r0_sq)
    med = float(np.median(thr))
    if len(lambdas) and lambdas[0] < med:
        raise LambdaBelowNet(f"lambda grid starts at {lambdas[0]:.6g} below the net threshold {med:.6g}")
    M = 8 * N + 1
    vals = np.empty(samples)
    for s in range(0, samples, 2048):
        part = c[s:s + 2048]
        u = grid_values(part, N, M)
        uk = grid_values(part, N, M, k)
        vals[s:s + 2048] = np.max(np.abs(uk * u.conj()), axis=1)
    pref = float(N) ** (2 + 2 * k)
    below = float(np.mean(thr > lambdas[0])) if len(lambdas) else 0.0
    return _curve("sup_quadratic", k, N, vals, lambdas, lambda lam: pref * np.exp(-lam / 4),
                  {"alpha": 0.5, "eps": float(N) ** (-2 - 2 * k), "L_N_over_R0sq": float(N) ** (1.5 + k),
                   "median_threshold": med, "below_net": below, "grid": M,
                   "samples": samples, "seed": seed, "weights": WEIGHT_NOTE})


def expected_net_threshold(k, N):
    """Threshold at the mean ``R_0^2 = sum 1/(1+|n|^k)^2``."""
    return float(net_threshold(k, N, float(np.sum(mode_std(k, N) ** 2))))


def linear_T(coeffs, k) -> float:
    """``sum |a_n|^2 / (1 + n^(2k))``."""
    a = np.asarray(coeffs, complex)
    N = (len(a) - 1) // 2
    n = np.abs(modes(N)).astype(float)
    return float(np.sum(np.abs(a) ** 2 / (1 + n ** (2 * k))))


def linear_tail_study(k, N, coeffs, lambdas, samples, seed, workers=1) -> SurvivalCurve:
    """Survival of ``|sum a_n psi_n|`` against ``c exp(-lambda^2 / T)``."""
    a = np.asarray(coeffs, complex)
    if a.shape != (2 * N + 1,):
        raise ValueError(f"need {2 * N + 1} coefficients")
    t = linear_T(a, k)
    vals = np.abs(sample_coeffs(k, N, samples, seed, workers) @ a)
    if t > 0:
        shape = lambda lam: np.exp(-lam ** 2 / t)  # noqa: E731
    else:
        shape = lambda lam: (lam <= 0).astype(float)  # noqa: E731
    return _curve("linear", k, N, vals, lambdas, shape,
                  {"T": t, "samples": samples, "seed": seed, "weights": WEIGHT_NOTE})


def derivative_functional(N, s):
    """Coefficients ``a_n = (i n)^s`` so that ``A psi = psi^(s)(0)``."""
    n = modes(N).astype(complex)
    return (1j * n) ** s

"""Gaussian measures gamma_k on truncated Fourier modes and the Gibbs density G_{k,N}."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRadius, NonRealFunctional
from .hierarchy import generate, q_decomposition, to_complex
from .spectral import FourierField, FunctionalEvaluator, modes, resize_coeffs

__all__ = [
    "GibbsSpec",
    "SampleBatch",
    "default_radii",
    "mode_std",
    "sample_gamma_k",
    "sample_coeffs",
    "chi",
    "GibbsDensity",
    "density_G",
    "density_convergence_study",
    "ConvergenceReport",
]

BLOCK = 1024
IMAG_TOL = 1e-10


def default_radii(k: int, beta: float) -> tuple:
    """``R_0 = sqrt(2 / (9 |beta|))`` and ``R_m = 10`` for ``m >= 1``."""
    r0 = math.sqrt(2 / (9 * abs(beta))) if beta else 10.0
    return (r0,) + (10.0,) * (k - 1)


@dataclass(frozen=True)
class GibbsSpec:
    k: int
    N: int
    beta: float = 1.0
    radii: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        radii = tuple(float(r) for r in self.radii) or default_radii(self.k, self.beta)
        if len(radii) != self.k:
            raise ValueError(f"need {self.k} radii R_0..R_{self.k - 1}, got {len(radii)}")
        for r in radii:
            if not r > 0:
                raise InvalidRadius(f"radius must be positive, got {r}")
        object.__setattr__(self, "radii", radii)

    def with_N(self, N):
        return GibbsSpec(self.k, N, self.beta, self.radii, self.seed)

    def as_dict(self):
        return {"k": self.k, "N": self.N, "beta": self.beta, "radii": list(self.radii), "seed": self.seed}


def mode_std(k: int, N: int) -> np.ndarray:
    """``sqrt(E|psi_n|^2) = 1 / (1 + |n|^k)``."""
    return 1.0 / (1.0 + np.abs(modes(N)).astype(float) ** k)


def _block_rng(seed, block):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block(seed, block, size, k, N):
    g = _block_rng(seed, block).standard_normal((size, 2, 2 * N + 1))
    return (g[:, 0] + 1j * g[:, 1]) * (mode_std(k, N) / math.sqrt(2))


def sample_coeffs(k, N, count, seed, workers=1) -> np.ndarray:
    """``count x (2N+1)`` draws from gamma_k.

    Samples come in blocks of 1024, each from its own child seed, so the
    result does not depend on ``workers``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    nblocks = -(-count // BLOCK)
    sizes = [min(BLOCK, count - b * BLOCK) for b in range(nblocks)]
    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _block(seed, b, sizes[b], k, N), range(nblocks)))
    else:
        parts = [_block(seed, b, sizes[b], k, N) for b in range(nblocks)]
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    spec: GibbsSpec
    coeffs: np.ndarray
    block_seeds: tuple = field(default=())

    @property
    def fields(self):
        return [FourierField(self.spec.N, c) for c in self.coeffs]

    def __len__(self):
        return len(self.coeffs)


def sample_gamma_k(spec: GibbsSpec, count: int, workers: int = 1) -> SampleBatch:
    c = sample_coeffs(spec.k, spec.N, count, spec.seed, workers)
    nblocks = -(-count // BLOCK)
    return SampleBatch(spec, c, tuple((spec.seed, b) for b in range(nblocks)))


def _smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, C-infinity in between."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1 - t, 1.0)), 0.0)
    return a / (a + b)


def chi(R, x):
    """Even cutoff: 1 on ``|x| <= R/2``, 0 on ``|x| >= R``."""
    if not R > 0:
        raise InvalidRadius(f"radius must be positive, got {R}")
    x = np.abs(np.asarray(x, dtype=float))
    out = 1.0 - _smooth_step((x - R / 2) / (R / 2))
    return float(out) if out.ndim == 0 else out


def _non_real(q):
    # roundoff grows with |q|, so the tolerance is relative above 1
    return np.abs(q.imag) > IMAG_TOL * np.maximum(1.0, np.abs(q.real))


class GibbsDensity:
    """Batched ``G_{k,N} = prod_m chi_{R_m}(E_m) * exp(-Re int q_k)``."""

    def __init__(self, spec: GibbsSpec, hierarchy=None, chunk: int = 2048):
        k = spec.k
        entries = hierarchy if hierarchy is not None else generate(2 * k)
        if len(entries) <= 2 * k:
            raise ValueError(f"hierarchy must contain rung {2 * k}")
        self.spec = spec
        self.chunk = chunk
        self.q = q_decomposition(entries, k).q
        self.h = [to_complex(entries[2 * m].h) for m in range(k)]
        self._evals = {}

    def _evaluators(self, N):
        if N not in self._evals:
            b = self.spec.beta
            self._evals[N] = ([FunctionalEvaluator(h, N, b) for h in self.h], FunctionalEvaluator(self.q, N, b))
        return self._evals[N]

    def integrals(self, coeffs, N):
        """``(E_0..E_{k-1}, int q_k)`` as complex arrays of shape ``(k+1, count)``."""
        coeffs = np.atleast_2d(coeffs)
        hs, qe = self._evaluators(N)
        out = np.empty((len(hs) + 1, len(coeffs)), complex)
        for s in range(0, len(coeffs), self.chunk):
            part = coeffs[s:s + self.chunk]
            for i, e in enumerate(hs):
                out[i, s:s + self.chunk] = e(part)
            out[-1, s:s + self.chunk] = qe(part)
        return out

    def __call__(self, coeffs, N=None):
        coeffs = np.atleast_2d(coeffs)
        N = self.spec.N if N is None else N
        vals = self.integrals(coeffs, N)
        q = vals[-1]
        if np.any(_non_real(q)):
            raise NonRealFunctional(f"imaginary part {np.abs(q.imag).max():.3e} in int q_{self.spec.k}")
        g = np.exp(-q.real)
        for m, R in enumerate(self.spec.radii):
            g = g * chi(R, vals[m].real)
        return g


def density_G(field: FourierField, spec: GibbsSpec, hierarchy=None) -> float:
    return float(GibbsDensity(spec, hierarchy)(field.coeffs, field.N)[0])


@dataclass(frozen=True)
class ConvergenceReport:
    spec: GibbsSpec
    Ns: tuple
    samples: int
    diffs: tuple          # (N, mean |G_N - G_2N|, stderr)
    moments: tuple        # (N, p, moment, stderr)
    energy_medians: tuple  # (N, m, median |E_m(psi_N) - E_m(psi_2N)|)

    @property
    def strictly_decreasing(self):
        d = [x[1] for x in self.diffs]
        return all(b < a for a, b in zip(d, d[1:]))

    def moment_ratio(self, p=1.5):
        vals = [m for (_, pp, m, _) in self.moments if pp == p]
        if not vals or min(vals) <= 0:
            return math.inf
        return max(vals) / min(vals)

    @property
    def energies_decreasing(self):
        by_m = {}
        for N, m, v in self.energy_medians:
            by_m.setdefault(m, []).append(v)
        return all(all(b < a for a, b in zip(v, v[1:])) for v in by_m.values())


def density_convergence_study(spec: GibbsSpec, Ns, samples: int, hierarchy=None,
                              powers=(1.0, 1.25, 1.5), workers=1) -> ConvergenceReport:
    """Cauchy diagnostic for ``G_{k,N}`` along ``Ns``.

    All samples are drawn once at ``max(Ns)`` and projected to each ``N``.
    """
    Ns = tuple(int(n) for n in Ns)
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be increasing")
    top = max(Ns)
    coeffs = sample_coeffs(spec.k, top, samples, spec.seed, workers)
    dens = GibbsDensity(spec.with_N(top), hierarchy)
    G = {}
    E = {}
    for N in Ns:
        proj = resize_coeffs(coeffs, top, N)
        vals = dens.integrals(proj, N)
        q = vals[-1]
        if np.any(_non_real(q)):
            raise NonRealFunctional(f"imaginary part {np.abs(q.imag).max():.3e} at N={N}")
        g = np.exp(-q.real)
        for m, R in enumerate(spec.radii):
            g = g * chi(R, vals[m].real)
        G[N] = g
        E[N] = vals[:-1].real
    diffs = []
    energy = []
    for a, b in zip(Ns, Ns[1:]):
        d = np.abs(G[a] - G[b])
        diffs.append((a, float(d.mean()), float(d.std(ddof=1) / math.sqrt(samples))))
        for m in range(spec.k):
            energy.append((a, m, float(np.median(np.abs(E[a][m] - E[b][m])))))
    moments = []
    for N in Ns:
        for p in powers:
            v = G[N] ** p
            moments.append((N, p, float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))))
    return ConvergenceReport(spec.with_N(top), Ns, samples, tuple(diffs), tuple(moments), tuple(energy))

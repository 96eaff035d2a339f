"""Truncated Fourier fields on the circle and the DNLS flow.

A field is stored as its coefficients ``psi_n`` for ``n = -N..N``.  Grid values
are obtained by placing coefficient ``n`` at FFT slot ``n mod M``; on that grid
``psi(x_j) = M * ifft(...)_j`` with ``x_j = 2 pi j / M``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

from .diffpoly import AB, PSI, DiffPoly
from .errors import NonFinite, StepSizeInvalid
from .rational import to_complex as _c

__all__ = [
    "FourierField",
    "NormSpec",
    "FunctionalEvaluator",
    "eval_functional",
    "sobolev_norm",
    "integrate_flow",
    "flow_series",
    "check_inequalities",
    "InequalityReport",
    "random_trig_poly",
]


def modes(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


@dataclass(frozen=True, eq=False)
class FourierField:
    """``psi_N = sum_{|n| <= N} psi_n e^{inx}``."""

    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.N + 1,):
            raise ValueError(f"expected {2 * self.N + 1} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, N):
        return cls(N, np.zeros(2 * N + 1, complex))

    @classmethod
    def from_modes(cls, N, values: dict):
        c = np.zeros(2 * N + 1, complex)
        for n, v in values.items():
            c[n + N] = v
        return cls(N, c)

    def __getitem__(self, n):
        return self.coeffs[n + self.N]

    def __eq__(self, other):
        return isinstance(other, FourierField) and self.N == other.N and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def values(self, M=None, order=0):
        """Grid samples of ``psi^(order)`` on ``M`` equispaced points."""
        M = M or 2 * self.N + 1
        return grid_values(self.coeffs, self.N, M, order)

    def resize(self, N):
        """Project onto (or zero-pad to) truncation ``N``."""
        return FourierField(N, resize_coeffs(self.coeffs, self.N, N))

    def to_json(self):
        return json.dumps([[float(z.real), float(z.imag)] for z in self.coeffs])

    @classmethod
    def from_json(cls, text):
        pairs = json.loads(text)
        N = (len(pairs) - 1) // 2
        return cls(N, np.array([complex(r, i) for r, i in pairs]))


def resize_coeffs(coeffs, N_old, N_new):
    coeffs = np.asarray(coeffs)
    out = np.zeros(coeffs.shape[:-1] + (2 * N_new + 1,), complex)
    m = min(N_old, N_new)
    out[..., N_new - m:N_new + m + 1] = coeffs[..., N_old - m:N_old + m + 1]
    return out


def grid_values(coeffs, N, M, order=0):
    """Batched grid evaluation; ``coeffs`` has shape ``(..., 2N+1)``."""
    if M < 2 * N + 1:
        raise ValueError("grid too small for the field")
    coeffs = np.asarray(coeffs, complex)
    n = modes(N)
    c = coeffs * (1j * n) ** order if order else coeffs
    buf = np.zeros(coeffs.shape[:-1] + (M,), complex)
    buf[..., n % M] = c
    return ifft(buf, axis=-1) * M


def grid_to_coeffs(values, N):
    """Inverse of :func:`grid_values` with projection to ``|n| <= N``."""
    M = values.shape[-1]
    spec = fft(values, axis=-1) / M
    return spec[..., modes(N) % M]


@dataclass(frozen=True)
class NormSpec:
    s: float
    homogeneous: bool = False


def sobolev_norm(field: FourierField, spec: NormSpec) -> float:
    """Coefficient-sum norm: weight ``(1+|n|)^{2s}`` or ``|n|^{2s}`` (homogeneous)."""
    n = np.abs(modes(field.N)).astype(float)
    p = np.abs(field.coeffs) ** 2
    if spec.homogeneous:
        mask = n > 0
        return float(math.sqrt(np.sum(n[mask] ** (2 * spec.s) * p[mask])))
    return float(math.sqrt(np.sum((1 + n) ** (2 * spec.s) * p)))


class FunctionalEvaluator:
    """Evaluate ``(1/2pi) int f(psi_N)`` for a batch of coefficient vectors.

    The grid has ``M >= d N + 1`` points with ``d`` the top monomial degree, so
    the mean of every monomial product is exact up to roundoff.
    """

    def __init__(self, f: DiffPoly, N: int, beta: float, oversample: int = 1):
        if f.names not in (PSI, AB) and f.terms:
            raise ValueError(f"unsupported variables {f.names}")
        self.N = N
        self.complex_vars = f.names == PSI
        deg = max((len(g) for _, g in f.terms), default=0)
        self.M = next_fast_len(max(deg * N + 1, 2 * N + 1) * oversample)
        gens = sorted({g for _, gs in f.terms for g in gs})
        self.orders = sorted({o for _, o in gens})
        terms = {}
        for (j, gs), c in f.terms.items():
            terms[gs] = terms.get(gs, 0) + _c(c) * beta ** j
        self.terms = sorted(terms.items())

    def __call__(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, complex)
        base = {o: grid_values(coeffs, self.N, self.M, o) for o in self.orders}
        if self.complex_vars:
            vals = {}
            for o, v in base.items():
                vals[(0, o)] = v
                vals[(1, o)] = v.conj()
        else:
            vals = {}
            for o, v in base.items():
                vals[(0, o)] = v.real
                vals[(1, o)] = v.imag
        out = np.zeros(coeffs.shape[:-1], complex)
        for gs, c in self.terms:
            if not gs:
                out = out + c
                continue
            prod = vals[gs[0]]
            for g in gs[1:]:
                prod = prod * vals[g]
            out = out + c * prod.mean(axis=-1)
        return out


def eval_functional(f: DiffPoly, field: FourierField, beta: float, oversample: int = 1) -> complex:
    return complex(FunctionalEvaluator(f, field.N, beta, oversample)(field.coeffs))


# -- DNLS flow -------------------------------------------------------------------

class _Stepper:
    """Integrating-factor RK4 for ``psi_t = -i psi'' + beta (psi |psi|^2)'``."""

    def __init__(self, N, beta, dt):
        self.N = N
        self.beta = beta
        self.dt = dt
        n = modes(N)
        self.ik = 1j * n
        self.E = np.exp(1j * n ** 2 * dt / 2)
        self.E2 = self.E * self.E
        self.M = next_fast_len(4 * N + 1)

    def nonlinear(self, c):
        u = grid_values(c, self.N, self.M)
        return self.beta * self.ik * grid_to_coeffs(u * (u * u.conj()), self.N)

    def step(self, u):
        h, E, E2 = self.dt, self.E, self.E2
        k1 = self.nonlinear(u)
        k2 = self.nonlinear(E * (u + h / 2 * k1))
        k3 = self.nonlinear(E * u + h / 2 * k2)
        k4 = self.nonlinear(E2 * u + h * E * k3)
        return E2 * u + h / 6 * (E2 * k1 + 2 * E * (k2 + k3) + k4)


def _plan(t_end, dt):
    if not dt > 0:
        raise StepSizeInvalid(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    steps = int(round(t_end / dt))
    if steps == 0:
        return 0, dt
    return steps, t_end / steps


def integrate_flow(field: FourierField, beta: float, t_end: float, dt: float) -> FourierField:
    """Advance the DNLS flow ``i psi_t = psi'' + i beta (psi |psi|^2)'``.

    The step is adjusted to divide ``t_end`` exactly.
    """
    steps, h = _plan(t_end, dt)
    if steps == 0:
        return field
    st = _Stepper(field.N, beta, h)
    u = field.coeffs.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            u = st.step(u)
            if not np.all(np.isfinite(u)):
                raise NonFinite("coefficients became non-finite")
    return FourierField(field.N, u)


def flow_series(field, beta, t_end, dt, functionals, every=100):
    """Integrate and record ``[t, F_1, ..., F_m]`` rows every ``every`` steps."""
    steps, h = _plan(t_end, dt)
    evals = [FunctionalEvaluator(f, field.N, beta) for f in functionals]
    st = _Stepper(field.N, beta, h)
    u = field.coeffs.copy()
    rows = [[0.0] + [complex(e(u)).real for e in evals]]
    for i in range(1, steps + 1):
        u = st.step(u)
        if not np.all(np.isfinite(u)):
            raise NonFinite("coefficients became non-finite")
        if i % every == 0 or i == steps:
            rows.append([i * h] + [complex(e(u)).real for e in evals])
    return FourierField(field.N, u), rows


# -- inequalities from the Sobolev control argument -------------------------------

@dataclass(frozen=True)
class InequalityReport:
    """Left/right sides of the three inequalities; ``applicable[2]`` gates the last."""

    lhs: tuple
    rhs: tuple
    applicable: tuple

    @property
    def margins(self):
        return tuple(r - l for l, r in zip(self.lhs, self.rhs))

    @property
    def holds(self):
        return tuple((not a) or l <= r * (1 + 1e-12) + 1e-300 for l, r, a in zip(self.lhs, self.rhs, self.applicable))

    @property
    def all_hold(self):
        return all(self.holds)


_TWO_PI = 2 * math.pi


def _h2_psi(beta_dummy=None):
    from .hierarchy import generate, to_complex
    return to_complex(generate(2)[2].h)


_CUBIC = DiffPoly({(0, ((0, 0), (0, 0), (1, 0), (1, 1))): 1}, PSI)


def check_inequalities(field: FourierField, beta: float, h2: DiffPoly | None = None) -> InequalityReport:
    """Gagliardo–Nirenberg, the cubic-term bound and the k=1 Sobolev control.

    Norms are Lebesgue norms on ``[0, 2pi)`` (not averaged):
    ``||u||_{L2}^2 = 2 pi sum |u_n|^2``.  ``E_1`` and the cubic integral are
    likewise plain integrals over the period.
    """
    c = field.coeffs
    n = modes(field.N)
    l2 = math.sqrt(_TWO_PI * float(np.sum(np.abs(c) ** 2)))
    hd1 = math.sqrt(_TWO_PI * float(np.sum(n ** 2 * np.abs(c) ** 2)))
    M = next_fast_len(6 * field.N + 1)
    u = field.values(M)
    l6_cubed = math.sqrt(_TWO_PI * float(np.mean(np.abs(u) ** 6)))
    cubic = _TWO_PI * abs(eval_functional(_CUBIC, field, beta))
    h2 = h2 if h2 is not None else _h2_psi()
    e1 = _TWO_PI * eval_functional(h2, field, beta).real
    r0 = l2
    lhs = (l6_cubed, cubic, 0.25 * hd1 ** 2)
    rhs = (hd1 * l2 ** 2 + l2 ** 3 / _TWO_PI,
           1.5 * hd1 ** 2 * r0 ** 2 + r0 ** 4 / (8 * math.pi ** 2),
           abs(e1) + 3 / 32 * r0 ** 4)
    applicable = (True, True, beta == 0 or r0 <= math.sqrt(2 / (9 * abs(beta))))
    return InequalityReport(lhs, rhs, applicable)


def random_trig_poly(rng, N_max=16, r0_max=None):
    """Random trigonometric polynomial; L2 norm uniform in ``(0, r0_max]`` if given."""
    N = int(rng.integers(1, N_max + 1))
    decay = rng.uniform(0.0, 3.0)
    w = (1.0 + np.abs(modes(N))) ** (-decay)
    c = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) * w
    if rng.random() < 0.2:
        keep = rng.random(2 * N + 1) < 0.3
        keep[rng.integers(0, 2 * N + 1)] = True
        c = c * keep
    if r0_max is not None:
        target = r0_max * (1 - rng.random())
        c = c * (target / math.sqrt(_TWO_PI * float(np.sum(np.abs(c) ** 2))))
    return FourierField(N, c)

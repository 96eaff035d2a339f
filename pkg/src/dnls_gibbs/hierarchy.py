"""Lenard–Magri ladder of DNLS conserved densities.

The densities live in the real variables ``a, b`` (``psi = a + i b``).  Each
rung is obtained from the previous one by solving

    d(a g) = -a d(xi^a) - b d(xi^b)
    xi_{n+1} = (d xi^b - 2 beta a (a g), -d xi^a - 2 beta b (a g))

with ``a g`` computed by exact antidifferentiation, then
``h_{n+1} = homotopy_integrate(xi_{n+1})``.
"""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .diffpoly import (
    AB,
    PSI,
    DiffPoly,
    DiffPolyVector,
    bigrade_components,
    derive,
    functional_eq,
    homotopy_integrate,
    integrate_total,
    normal_form,
    order,
    parse,
    symbols,
    variational_derivative,
)
from .errors import MalformedRung
from .rational import QQi, format_coeff

log = logging.getLogger(__name__)

__all__ = [
    "HierarchyEntry",
    "QDecomposition",
    "seed_entries",
    "lenard_magri_step",
    "generate",
    "to_complex",
    "from_complex",
    "q_decomposition",
    "involution_holds",
    "grading_problems",
    "template_residual",
    "leading_term_check",
    "printed_integrals",
    "compare_printed",
    "rung_to_json",
    "load_golden",
]

I = QQi(Fraction(0), Fraction(1))
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HierarchyEntry:
    n: int
    h: DiffPoly
    xi: DiffPolyVector
    p: DiffPolyVector
    beta_parts: tuple = field(default=())

    @classmethod
    def build(cls, n, h, xi):
        return cls(n=n, h=h, xi=xi, p=xi.d(), beta_parts=tuple(bigrade_components(h)))

    def h_part(self, j):
        """The beta^j homogeneous component ``h_{n,j}`` (without the beta factor)."""
        return self.h.coefficient_of_beta(j)


@dataclass(frozen=True)
class QDecomposition:
    k: int
    leading_coeff: dict
    q: DiffPoly
    ptilde: tuple = ()


def _beta(names=AB):
    return DiffPoly({(1, ()): 1}, names)


def seed_entries():
    """Rungs 0 and 1, built from the printed seeds."""
    a, b = symbols(AB)
    B = _beta()
    r2 = a * a + b * b
    xi0 = DiffPolyVector([a, b])
    xi1 = DiffPolyVector([b.d() + B * a * r2, -a.d() + B * b * r2])
    return [HierarchyEntry.build(0, homotopy_integrate(xi0), xi0),
            HierarchyEntry.build(1, homotopy_integrate(xi1), xi1)]


def _grading_filter(h: DiffPoly, n: int) -> DiffPoly:
    keep = {}
    dropped = []
    for j, deg, dd, part in bigrade_components(h):
        if deg == 2 * j + 2:
            keep.update(part.terms)
        else:
            dropped.append((j, deg, dd))
    if dropped:
        log.info("rung %d: dropped off-grade components %s", n, dropped)
    return DiffPoly(keep, h.names)


def lenard_magri_step(entry: HierarchyEntry) -> HierarchyEntry:
    a, b = symbols(AB)
    B = _beta()
    xa, xb = entry.xi
    F = integrate_total(-(a * derive(xa)) - b * derive(xb))
    xi = DiffPolyVector([derive(xb) - 2 * B * a * F, -derive(xa) - 2 * B * b * F])
    h = homotopy_integrate(xi)
    filtered = _grading_filter(h, entry.n + 1)
    if filtered != h:
        h = filtered
        xi = variational_derivative(h)
    return HierarchyEntry.build(entry.n + 1, h, xi)


_LADDER: list = []
_LOCK = threading.Lock()


def generate(n_max: int) -> list:
    """Rungs ``0..n_max`` (cached across calls)."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    with _LOCK:
        if not _LADDER:
            _LADDER.extend(seed_entries())
        while len(_LADDER) <= n_max:
            _LADDER.append(lenard_magri_step(_LADDER[-1]))
        return list(_LADDER[: n_max + 1])


# -- change of variables ------------------------------------------------------

def _substitute(p: DiffPoly, images, names) -> DiffPoly:
    """Replace generator ``(v, o)`` by ``sum_w c_vw u_w^(o)`` with ``images[v] = {w: c_vw}``."""
    out = {}
    for (j, gens), c in p.terms.items():
        partial_terms = {(): c}
        for v, o in gens:
            nxt = {}
            for mono, coef in partial_terms.items():
                for w, cw in images[v].items():
                    key = tuple(sorted(mono + ((w, o),)))
                    val = nxt.get(key, 0) + coef * cw
                    nxt[key] = val
            partial_terms = {k: v_ for k, v_ in nxt.items() if v_ != 0}
        for mono, coef in partial_terms.items():
            key = (j, mono)
            val = out.get(key, 0) + coef
            out[key] = val
    return DiffPoly(out, names)


def to_complex(p: DiffPoly) -> DiffPoly:
    """``a = (psi + psibar)/2``, ``b = (psi - psibar)/(2i)``."""
    return _substitute(p, [{0: HALF, 1: HALF}, {0: -I * HALF, 1: I * HALF}], PSI)


def from_complex(p: DiffPoly) -> DiffPoly:
    """``psi = a + i b``, ``psibar = a - i b``."""
    return _substitute(p, [{0: Fraction(1), 1: I}, {0: Fraction(1), 1: -I}], AB)


# -- remainder q_k ---------------------------------------------------------------

def _psi(n):
    return DiffPoly.gen(0, n, PSI)


def _psibar(n):
    return DiffPoly.gen(1, n, PSI)


def sobolev_density(k: int) -> DiffPoly:
    """``1/2 psi^(k) psibar^(k)``."""
    return _psi(k) * _psibar(k) * HALF


def leading_monomial(k: int) -> tuple:
    """Generator tuple of ``psibar^(k) psi^(k-1) psibar psi``."""
    return tuple(sorted([(1, k), (0, k - 1), (1, 0), (0, 0)]))


def _ptilde_monomials(k):
    """Monomials whose image under psi, psibar -> u is u^(k-1) u^(n1) u^(n2) u^(n3)."""
    out = []
    for n1 in range(k):
        for n2 in range(n1 + 1):
            n3 = k - n1 - n2
            if not 0 <= n3 <= n2:
                continue
            orders = [k - 1, n1, n2, n3]
            for mask in range(16):
                gens = tuple(sorted(((mask >> i) & 1, o) for i, o in enumerate(orders)))
                if gens not in out:
                    out.append(gens)
    return sorted(out)


def _solve_exact(columns, target):
    """Solve ``sum_i x_i columns[i] = target`` over exact coefficients.

    Vectors are dicts keyed by monomial.  Free unknowns are set to zero, so the
    answer is deterministic.  Returns ``None`` if the system is inconsistent.
    """
    keys = sorted({k for c in columns for k in c} | set(target))
    rows = [[c.get(key, Fraction(0)) for c in columns] + [target.get(key, Fraction(0))] for key in keys]
    ncol = len(columns)
    pivots = []
    r = 0
    for col in range(ncol):
        pr = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    x = [Fraction(0)] * ncol
    for i, col in enumerate(pivots):
        x[col] = rows[i][-1]
    return x


def q_decomposition(entries, k: int) -> QDecomposition:
    """``q_k = NF(h_{2k} - 1/2 psi^(k) psibar^(k))`` in complex variables.

    ``ptilde`` holds coefficients ``c(p)`` such that the beta-linear part of
    ``q_k`` equals the leading monomial term plus ``sum c(p) p`` modulo total
    derivatives, over monomials ``p`` reducing to ``u^(k-1) u^(n1) u^(n2) u^(n3)``
    with ``n1 + n2 + n3 = k``.  It is ``None`` when no such representation
    exists.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rung = next((e for e in entries if e.n == 2 * k), None)
    if rung is None:
        raise ValueError(f"entries do not contain rung {2 * k}")
    hc = normal_form(to_complex(rung.h))
    top = sobolev_density(k)
    key = next(iter(top.terms))
    if hc.terms.get(key) != HALF:
        raise MalformedRung(f"rung {2 * k} lacks the term 1/2 psi^({k}) psibar^({k})")
    q = normal_form(hc - top)
    lead_gens = leading_monomial(k)
    lead = q.beta_coeff(lead_gens)
    monos = [g for g in _ptilde_monomials(k) if g != lead_gens]
    target = {g: c for (j, g), c in q.terms.items() if j == 1 and g != lead_gens}
    columns = [{g2: c for (_, g2), c in normal_form(DiffPoly({(0, g): 1}, PSI)).terms.items()} for g in monos]
    sol = _solve_exact(columns, target)
    if sol is None:
        log.warning("beta-linear part of q_%d is not spanned by the P-tilde monomials", k)
        ptilde = None
    else:
        ptilde = tuple(zip(monos, sol))
    return QDecomposition(k=k, leading_coeff=lead, q=q, ptilde=ptilde)


# -- structural checks ----------------------------------------------------------------

def involution_holds(entries, m: int, n: int) -> bool:
    """``int xi_m . d xi_n == 0`` modulo total derivatives."""
    xm = entries[m].xi
    xn = entries[n].xi
    density = xm.dot(xn.d())
    if density.constant_term():
        return False
    return variational_derivative(density).is_zero()


def grading_problems(entry: HierarchyEntry) -> list:
    """Violations of the bigrading of ``h_n`` and the order pattern of ``xi_n``."""
    n = entry.n
    problems = []
    if entry.h.constant_term():
        problems.append("h has a constant term")
    for j, deg, dd, _ in entry.beta_parts:
        if deg != 2 * j + 2 or dd != n - j:
            problems.append(f"beta^{j} component has (deg, dd) = ({deg}, {dd})")
        if j > n:
            problems.append(f"beta^{j} exceeds n")
    if order(entry.xi) != n:
        problems.append(f"ord(xi) = {order(entry.xi)}")
    for j in range(n + 1):
        comp = entry.xi.coefficient_of_beta(j)
        if not comp.is_zero() and order(comp) != n - j:
            problems.append(f"ord(xi_{{n,{j}}}) = {order(comp)}")
    if variational_derivative(entry.h) != entry.xi:
        problems.append("xi differs from the variational derivative of h")
    return problems


def xi_template(n: int) -> DiffPolyVector:
    """Leading part of ``xi_n`` as displayed for even and odd rungs."""
    a, b = symbols(AB)
    B = _beta()
    r2 = a * a + b * b
    if n % 2 == 0:
        m = n // 2
        s = -1 if m % 2 else 1
        if m == 0:
            return DiffPolyVector([a, b])
        return DiffPolyVector([
            (a.d(2 * m) - (2 * m + 1) * B * r2 * b.d(2 * m - 1)) * s,
            (b.d(2 * m) + (2 * m + 1) * B * r2 * a.d(2 * m - 1)) * s,
        ])
    m = (n - 1) // 2
    s = -1 if m % 2 else 1
    mix = a * a.d(2 * m) + b * b.d(2 * m)
    return DiffPolyVector([
        (b.d(2 * m + 1) + 2 * B * a * mix + (2 * m + 1) * B * r2 * a.d(2 * m)) * s,
        (-a.d(2 * m + 1) + 2 * B * b * mix + (2 * m + 1) * B * r2 * b.d(2 * m)) * s,
    ])


def template_residual(entries, n: int):
    """Return ``(residual, allowed_order, ok)`` for ``xi_n`` minus its template."""
    res = entries[n].xi - xi_template(n)
    allowed = n - 2
    ok = res.is_zero() or order(res) <= allowed
    return res, allowed, ok


def leading_term_check(entries, k: int):
    """Check ``h_{2k} = 1/2 psi^(k) psibar^(k) + (2k+1)i/2 beta psibar^(k) psi^(k-1) psibar psi + R``.

    Returns ``(ok, remainder)`` where ``remainder`` is ``R`` in normal form and
    must have differential order at most ``k - 1``.
    """
    dec = q_decomposition(entries, k)
    expected = {1: QQi(Fraction(0), Fraction(2 * k + 1, 2))}
    lead = DiffPoly({(1, leading_monomial(k)): expected[1]}, PSI)
    rem = dec.q - lead
    ok = dec.leading_coeff == expected and (not rem or order(rem) <= k - 1)
    return ok, rem


# -- integrals as printed in complex form --------------------------------------------

def printed_integrals() -> dict:
    """The first five densities in the commonly quoted complex form."""
    p, pb = _psi, _psibar
    B = _beta(PSI)
    i = I
    h = {}
    h[0] = p(0) * pb(0) * HALF
    h[1] = p(0) * pb(1) * (i * HALF) + B * (p(0) * pb(0)) ** 2 * Fraction(1, 4)
    h[2] = (p(1) * pb(1) * HALF + B * p(0) ** 2 * pb(0) * pb(1) * (i * Fraction(3, 2))
            + B ** 2 * (p(0) * pb(0)) ** 3 * Fraction(1, 4))
    h[3] = (p(1) * pb(2) * (i * HALF)
            + B * (p(1) ** 2 * pb(0) ** 2 + 8 * p(0) * pb(0) * p(1) * pb(1) + p(0) ** 2 * pb(1) ** 2)
            * Fraction(1, 4)
            + B ** 2 * p(0) ** 3 * pb(0) ** 2 * pb(1) * (i * Fraction(5, 4))
            + B ** 3 * (p(0) * pb(0)) ** 4 * Fraction(5, 16))
    h[4] = (p(2) * pb(2) * HALF
            + B * (p(0) * pb(0) * p(1) * pb(2) - p(0) * pb(0) * p(2) * pb(1)) * (i * Fraction(5, 4))
            + B ** 2 * (p(0) * pb(0) ** 3 * p(1) ** 2 + 5 * p(0) ** 2 * pb(0) ** 2 * p(1) * pb(1)
                        + p(0) ** 3 * pb(0) * pb(1) ** 2) * Fraction(5, 4)
            + B ** 3 * p(0) ** 4 * pb(0) ** 3 * pb(1) * (i * Fraction(35, 16))
            + B ** 4 * (p(0) * pb(0)) ** 5 * Fraction(7, 16))
    return h


def compare_printed(entries) -> dict:
    """For each printed rung: ``(matches, difference in normal form)``.

    Mismatches are logged, never raised; the recursion is authoritative.
    """
    out = {}
    for n, ref in printed_integrals().items():
        if n >= len(entries):
            continue
        gen = to_complex(entries[n].h)
        same = functional_eq(gen, ref)
        diff = normal_form(gen - ref)
        if not same:
            log.warning("rung %d differs from the printed density by %s", n, diff.to_text())
        out[n] = (same, diff)
    return out


# -- export -----------------------------------------------------------------------------

def _gens_text(gens, names):
    return "*".join(f"{names[v]}^({o})" for v, o in gens)


def rung_to_json(entry: HierarchyEntry) -> dict:
    d = {
        "n": entry.n,
        "h": entry.h.to_text(),
        "xi": [c.to_text() for c in entry.xi],
        "beta_parts": [{"j": j, "deg": deg, "dd": dd, "text": part.to_text()}
                       for j, deg, dd, part in entry.beta_parts],
    }
    if entry.n >= 2 and entry.n % 2 == 0:
        k = entry.n // 2
        dec = q_decomposition([entry], k)
        d["q"] = dec.q.to_text()
        d["leading_coeff"] = {str(j): format_coeff(c) for j, c in sorted(dec.leading_coeff.items())}
        d["ptilde"] = (None if dec.ptilde is None else
                       [{"monomial": _gens_text(g, PSI), "coeff": format_coeff(c)} for g, c in dec.ptilde])
    return d


def load_golden(n: int) -> dict:
    """Stored reference export of rung ``n`` (``n <= 4``)."""
    path = resources.files("dnls_gibbs") / "data" / f"rung_{n}.json"
    return json.loads(path.read_text(encoding="utf-8"))


def entry_from_json(d: dict) -> HierarchyEntry:
    h = parse(d["h"], AB)
    xi = DiffPolyVector(parse(t, AB) for t in d["xi"])
    return HierarchyEntry.build(d["n"], h, xi)

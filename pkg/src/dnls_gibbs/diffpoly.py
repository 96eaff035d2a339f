"""Exact differential polynomials in a finite set of field variables.

A monomial is stored as ``(j, gens)`` where ``j`` is the exponent of the formal
parameter beta and ``gens`` is a sorted tuple of generators ``(var, order)``,
one entry per factor (so ``a*a'`` is ``((0, 0), (0, 1))``).  Coefficients are
exact (``Fraction`` or :class:`~dnls_gibbs.rational.QQi`).

The quotient ``V / dV`` (local functionals) is handled two ways: equality via
the variational derivative (:func:`functional_eq`) and a canonical
representative via linear elimination against total derivatives
(:func:`normal_form`).
"""
from __future__ import annotations

import math
from bisect import insort
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import NotExact, NotVariational
from .rational import as_exact, format_coeff, parse_coeff

__all__ = [
    "DiffPoly",
    "DiffPolyVector",
    "MatrixDiffOp",
    "AB",
    "PSI",
    "symbols",
    "beta",
    "derive",
    "partial",
    "variational_derivative",
    "frechet",
    "adjoint",
    "functional_eq",
    "integrate_total",
    "homotopy_integrate",
    "is_variational",
    "bigrade_components",
    "normal_form",
    "order",
    "parse",
]

AB = ("a", "b")
PSI = ("psi", "psibar")


def _merge(g1, g2):
    if not g1:
        return g2
    if not g2:
        return g1
    return tuple(sorted(g1 + g2))


class DiffPoly:
    """Immutable sparse differential polynomial with beta-polynomial coefficients."""

    __slots__ = ("terms", "names")

    def __init__(self, terms=None, names=AB):
        clean = {}
        if terms:
            for key, c in terms.items():
                if c != 0:
                    clean[key] = as_exact(c)
        self.terms = clean
        self.names = tuple(names)

    # -- construction -------------------------------------------------------
    @classmethod
    def _raw(cls, terms, names):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.names = names
        return obj

    @classmethod
    def gen(cls, var, order=0, names=AB):
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if not 0 <= var < len(names):
            raise ValueError(f"variable index {var} out of range for {names}")
        return cls._raw({(0, ((var, order),)): Fraction(1)}, tuple(names))

    @classmethod
    def const(cls, c, names=AB, beta_power=0):
        return cls({(beta_power, ()): c}, names)

    @property
    def nvars(self):
        return len(self.names)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, DiffPoly):
            return other
        return DiffPoly.const(other, self.names)

    def _names_with(self, other):
        if self.names == other.names:
            return self.names
        if other.is_constant():
            return self.names
        if self.is_constant():
            return other.names
        raise ValueError(f"incompatible variable sets {self.names} and {other.names}")

    def __add__(self, other):
        other = self._coerce(other)
        names = self._names_with(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v == 0:
                    del out[k]
                else:
                    out[k] = v
        return DiffPoly._raw(out, names)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({k: -c for k, c in self.terms.items()}, self.names)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            c = as_exact(other)
            if c == 0:
                return DiffPoly._raw({}, self.names)
            return DiffPoly._raw({k: v * c for k, v in self.terms.items()}, self.names)
        names = self._names_with(other)
        out = defaultdict(Fraction)
        for (j1, g1), c1 in self.terms.items():
            for (j2, g2), c2 in other.terms.items():
                out[(j1 + j2, _merge(g1, g2))] += c1 * c2
        return DiffPoly._raw({k: v for k, v in out.items() if v != 0}, names)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / as_exact(other))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        result = DiffPoly.const(1, self.names)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.terms == other.terms and (self.names == other.names or self.is_constant())
        try:
            return self == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"DiffPoly({self.to_text()!r}, names={self.names})"

    def __str__(self):
        return self.to_text()

    # -- structure ----------------------------------------------------------
    def is_constant(self):
        return all(not g for (_, g) in self.terms)

    def constant_term(self):
        """Beta-polynomial part with no field generators, as ``{j: coeff}``."""
        return {j: c for (j, g), c in self.terms.items() if not g}

    def beta_coeff(self, gens):
        """Coefficient of the monomial ``gens`` as a dict ``{j: coeff}``."""
        gens = tuple(sorted(gens))
        return {j: c for (j, g), c in self.terms.items() if g == gens}

    def beta_degree(self):
        return max((j for j, _ in self.terms), default=-1)

    def coefficient_of_beta(self, j):
        return DiffPoly._raw({(0, g): c for (jj, g), c in self.terms.items() if jj == j}, self.names)

    def at_beta(self, value):
        """Substitute an exact value for beta."""
        value = as_exact(value)
        out = defaultdict(Fraction)
        for (j, g), c in self.terms.items():
            out[(0, g)] += c * value ** j
        return DiffPoly({k: v for k, v in out.items()}, self.names)

    def monomials(self):
        return sorted(self.terms)

    def order(self):
        return order(self)

    def rename(self, names):
        if len(names) != len(self.names):
            raise ValueError("renaming must keep the number of variables")
        return DiffPoly._raw(dict(self.terms), tuple(names))

    def d(self, times=1):
        p = self
        for _ in range(times):
            p = derive(p)
        return p

    def map_coefficients(self, fn):
        return DiffPoly({k: fn(c) for k, c in self.terms.items()}, self.names)

    def conjugate_coefficients(self):
        return self.map_coefficients(lambda c: c.conjugate() if hasattr(c, "im") else c)

    # -- text ---------------------------------------------------------------
    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=_text_key):
            j, gens = key
            piece = [format_coeff(self.terms[key])]
            if j:
                piece.append(f"B^{j}")
            piece.extend(f"{self.names[v]}^({o})" for v, o in gens)
            parts.append("*".join(piece))
        return " + ".join(parts)


def _text_key(key):
    return (key[1], key[0])


def parse(text, names=None):
    """Inverse of :meth:`DiffPoly.to_text`.

    ``names`` defaults to whichever of ``("a", "b")`` / ``("psi", "psibar")``
    the generator names belong to.
    """
    text = text.strip()
    if names is None:
        names = PSI if "psi" in text else AB
    names = tuple(names)
    index = {n: i for i, n in enumerate(names)}
    if text == "0":
        return DiffPoly({}, names)
    terms = {}
    for chunk in text.split(" + "):
        fields = chunk.split("*")
        coeff = parse_coeff(fields[0])
        j = 0
        gens = []
        for f in fields[1:]:
            if f.startswith("B^"):
                j = int(f[2:])
                continue
            name, _, rest = f.partition("^(")
            if name not in index or not rest.endswith(")"):
                raise ValueError(f"malformed generator {f!r}")
            gens.append((index[name], int(rest[:-1])))
        key = (j, tuple(sorted(gens)))
        if key in terms:
            raise ValueError(f"repeated monomial in {text!r}")
        terms[key] = coeff
    return DiffPoly(terms, names)


def symbols(names=AB):
    """Order-zero generators, e.g. ``a, b = symbols()``."""
    return tuple(DiffPoly.gen(i, 0, names) for i in range(len(names)))


def beta(names=AB):
    return DiffPoly._raw({(1, ()): Fraction(1)}, tuple(names))


# -- derivations --------------------------------------------------------------

def derive(p: DiffPoly) -> DiffPoly:
    """Total derivative: ``d(u_i^(n)) = u_i^(n+1)`` extended by Leibniz."""
    out = defaultdict(Fraction)
    for (j, gens), c in p.terms.items():
        n = len(gens)
        i = 0
        while i < n:
            g = gens[i]
            run = i + 1
            while run < n and gens[run] == g:
                run += 1
            rest = list(gens[:i] + gens[i + 1:])
            insort(rest, (g[0], g[1] + 1))
            out[(j, tuple(rest))] += c * (run - i)
            i = run
    return DiffPoly._raw({k: v for k, v in out.items() if v != 0}, p.names)


def partial(p: DiffPoly, var: int, order_: int) -> DiffPoly:
    """Partial derivative with respect to the generator ``u_var^(order_)``."""
    g = (var, order_)
    out = defaultdict(Fraction)
    for (j, gens), c in p.terms.items():
        m = gens.count(g)
        if m:
            i = gens.index(g)
            out[(j, gens[:i] + gens[i + 1:])] += c * m
    return DiffPoly._raw({k: v for k, v in out.items() if v != 0}, p.names)


def _orders_of(p, var):
    return sorted({o for (_, gens) in p.terms for (v, o) in gens if v == var})


def order(p) -> float:
    """Differential order; ``-inf`` for constants.  Vectors take the max."""
    if isinstance(p, DiffPolyVector):
        return max(order(c) for c in p)
    return max((o for (_, gens) in p.terms for (_, o) in gens), default=-math.inf)


def variational_derivative(p: DiffPoly) -> DiffPolyVector:
    """``(delta p / delta u_i)_i = sum_n (-d)^n dp/du_i^(n)``."""
    comps = []
    for var in range(p.nvars):
        orders = _orders_of(p, var)
        acc = DiffPoly._raw({}, p.names)
        for n in range(orders[-1] if orders else -1, -1, -1):
            acc = partial(p, var, n) - derive(acc)
        comps.append(acc)
    return DiffPolyVector(comps)


class DiffPolyVector:
    """Fixed-length tuple of :class:`DiffPoly` (elements of V^l)."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __add__(self, other):
        return DiffPolyVector(x + y for x, y in zip(self, other, strict=True))

    def __sub__(self, other):
        return DiffPolyVector(x - y for x, y in zip(self, other, strict=True))

    def __neg__(self):
        return DiffPolyVector(-x for x in self)

    def __mul__(self, scalar):
        return DiffPolyVector(x * scalar for x in self)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DiffPolyVector):
            return NotImplemented
        return len(self) == len(other) and all(x == y for x, y in zip(self, other))

    def __hash__(self):
        return hash(tuple(hash(c) for c in self))

    def __repr__(self):
        return f"DiffPolyVector({[c.to_text() for c in self]})"

    def is_zero(self):
        return all(not c for c in self)

    def d(self, times=1):
        return DiffPolyVector(c.d(times) for c in self)

    def dot(self, other):
        total = DiffPoly._raw({}, self[0].names)
        for x, y in zip(self, other, strict=True):
            total = total + x * y
        return total

    def order(self):
        return order(self)

    def coefficient_of_beta(self, j):
        return DiffPolyVector(c.coefficient_of_beta(j) for c in self)


class MatrixDiffOp:
    """Matrix differential operator ``M_ij = sum_n c_ijn d^n`` with polynomial ``c``."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = []
        for row in entries:
            new_row = []
            for entry in row:
                acc = {}
                for coeff, power in entry:
                    acc[power] = acc[power] + coeff if power in acc else coeff
                new_row.append(tuple((acc[n], n) for n in sorted(acc) if acc[n]))
            rows.append(tuple(new_row))
        self.entries = tuple(rows)

    @property
    def size(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, MatrixDiffOp):
            return NotImplemented
        if self.size != other.size:
            return False
        for r1, r2 in zip(self.entries, other.entries):
            for e1, e2 in zip(r1, r2):
                if len(e1) != len(e2):
                    return False
                for (c1, n1), (c2, n2) in zip(e1, e2):
                    if n1 != n2 or c1 != c2:
                        return False
        return True

    def __hash__(self):
        return hash(tuple(tuple(tuple(n for _, n in e) for e in row) for row in self.entries))

    def __repr__(self):
        return "MatrixDiffOp(" + repr([[[(c.to_text(), n) for c, n in e] for e in row] for row in self.entries]) + ")"

    def order(self):
        return max((n for row in self.entries for e in row for _, n in e), default=-math.inf)

    def apply(self, v: DiffPolyVector) -> DiffPolyVector:
        out = []
        for row in self.entries:
            acc = DiffPoly._raw({}, v[0].names)
            for entry, comp in zip(row, v):
                for c, n in entry:
                    acc = acc + c * comp.d(n)
            out.append(acc)
        return DiffPolyVector(out)


def frechet(P: DiffPolyVector) -> MatrixDiffOp:
    """``(D_P)_ij = sum_n dP_i/du_j^(n) d^n``."""
    ell = len(P)
    rows = []
    for i in range(ell):
        row = []
        for jv in range(ell):
            row.append([(partial(P[i], jv, n), n) for n in _orders_of(P[i], jv)])
        rows.append(row)
    return MatrixDiffOp(rows)


def adjoint(M: MatrixDiffOp) -> MatrixDiffOp:
    """Formal adjoint: ``(sum c_n d^n)^* = sum (-d)^n o c_n``, transposed."""
    ell = M.size
    rows = []
    for i in range(ell):
        row = []
        for j in range(ell):
            acc = {}
            for c, n in M.entries[j][i]:
                sign = -1 if n % 2 else 1
                cd = c
                # (-d)^n o c = (-1)^n sum_r C(n, r) c^(n-r) d^r
                derivs = [cd]
                for _ in range(n):
                    cd = derive(cd)
                    derivs.append(cd)
                for r in range(n + 1):
                    term = derivs[n - r] * (sign * comb(n, r))
                    acc[r] = acc[r] + term if r in acc else term
            row.append([(acc[r], r) for r in sorted(acc)])
        rows.append(row)
    return MatrixDiffOp(rows)


def is_variational(xi: DiffPolyVector) -> bool:
    """Self-adjointness of the Frechet derivative."""
    D = frechet(xi)
    return D == adjoint(D)


def functional_eq(f: DiffPoly, g: DiffPoly) -> bool:
    """Equality of local functionals: ``f - g`` lies in the image of ``d``."""
    diff = f - g
    if diff.constant_term():
        return False
    return variational_derivative(diff).is_zero()


def integrate_total(p: DiffPoly) -> DiffPoly:
    """Return ``F`` with ``dF = p`` and zero constant term.

    Top-order generators are stripped one variable at a time: if ``p = dF``
    then ``p`` is linear in ``u_i^(m)`` with coefficient ``dF/du_i^(m-1)``,
    which is integrated in that single generator.
    """
    if p.constant_term():
        raise NotExact("a total derivative has no constant term")
    residual = p
    F = DiffPoly._raw({}, p.names)
    while residual:
        m = order(residual)
        if m == -math.inf or m == 0:
            raise NotExact(f"residual {residual.to_text()} is not a total derivative")
        for var in range(p.nvars):
            top = (var, m)
            below = (var, m - 1)
            piece = defaultdict(Fraction)
            for (j, gens), c in residual.terms.items():
                cnt = gens.count(top)
                if cnt == 0:
                    continue
                if cnt > 1:
                    raise NotExact("top-order generator appears nonlinearly")
                i = gens.index(top)
                rest = gens[:i] + gens[i + 1:]
                e = rest.count(below)
                new = list(rest)
                insort(new, below)
                piece[(j, tuple(new))] += c / (e + 1)
            if piece:
                G = DiffPoly._raw({k: v for k, v in piece.items() if v != 0}, p.names)
                F = F + G
                residual = residual - derive(G)
        if residual and order(residual) >= m:
            raise NotExact("top-order terms survive stripping")
    return F


def homotopy_integrate(xi: DiffPolyVector, check_adjoint: bool = False) -> DiffPoly:
    """Return ``h`` with ``delta h / delta u = xi`` via ``h = int_0^1 u.xi(t u) dt``.

    Raises :class:`NotVariational` when ``xi`` is not a variational derivative
    (checked post hoc, and optionally through self-adjointness first).
    """
    if check_adjoint and not is_variational(xi):
        raise NotVariational("Frechet derivative is not self-adjoint")
    names = xi[0].names
    out = defaultdict(Fraction)
    for var, comp in enumerate(xi):
        for (j, gens), c in comp.terms.items():
            new = list(gens)
            insort(new, (var, 0))
            out[(j, tuple(new))] += c / (len(gens) + 1)
    h = DiffPoly._raw({k: v for k, v in out.items() if v != 0}, names)
    if variational_derivative(h) != xi:
        raise NotVariational("homotopy formula does not reproduce the input")
    return h


def bigrade_components(p: DiffPoly):
    """Split into (beta exponent, deg, dd)-homogeneous parts, sorted by key."""
    parts = defaultdict(dict)
    for (j, gens), c in p.terms.items():
        parts[(j, len(gens), sum(o for _, o in gens))][(j, gens)] = c
    return [(j, deg, dd, DiffPoly._raw(terms, p.names)) for (j, deg, dd), terms in sorted(parts.items())]


# -- canonical representatives modulo total derivatives ------------------------

def _monomials(nvars, deg, dd):
    """All sorted generator tuples with ``deg`` factors and total order ``dd``."""
    gens = [(v, o) for v in range(nvars) for o in range(dd + 1)]
    out = []

    def rec(start, left, budget, prefix):
        if left == 0:
            if budget == 0:
                out.append(tuple(prefix))
            return
        for i in range(start, len(gens)):
            o = gens[i][1]
            if o > budget:
                continue
            prefix.append(gens[i])
            rec(i, left - 1, budget - o, prefix)
            prefix.pop()

    rec(0, deg, dd, [])
    return out


def _elim_key(gens):
    """Total order used to pick pivots: higher orders first, then psi over psibar."""
    s = sorted(gens, key=lambda g: (-g[1], g[0]))
    return (tuple(g[1] for g in s), tuple(-g[0] for g in s))


@lru_cache(maxsize=None)
def _derivative_basis(nvars, deg, dd):
    """Echelon basis of d(V_{deg, dd-1}) keyed by pivot monomial."""
    pivots = {}
    if dd == 0:
        return pivots
    for mono in _monomials(nvars, deg, dd - 1):
        row = {}
        n = len(mono)
        i = 0
        while i < n:
            g = mono[i]
            run = i + 1
            while run < n and mono[run] == g:
                run += 1
            rest = list(mono[:i] + mono[i + 1:])
            insort(rest, (g[0], g[1] + 1))
            t = tuple(rest)
            row[t] = row.get(t, 0) + (run - i)
            i = run
        row = {k: Fraction(v) for k, v in row.items() if v}
        while row:
            lead = max(row, key=_elim_key)
            piv = pivots.get(lead)
            if piv is None:
                inv = 1 / row[lead]
                pivots[lead] = {k: v * inv for k, v in row.items()}
                break
            f = row[lead]
            for k, v in piv.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return pivots


def normal_form(p: DiffPoly) -> DiffPoly:
    """Canonical representative of ``p`` modulo total derivatives.

    Within each (beta, deg, dd) block, monomials that lead some element of the
    image of ``d`` are eliminated, highest first under :func:`_elim_key`.  Two
    polynomials are functionally equal iff their normal forms coincide.
    """
    out = {}
    for j, deg, dd, part in bigrade_components(p):
        pivots = _derivative_basis(p.nvars, deg, dd)
        work = {g: c for (_, g), c in part.terms.items()}
        while True:
            cands = [g for g in work if g in pivots]
            if not cands:
                break
            lead = max(cands, key=_elim_key)
            f = work[lead]
            for k, v in pivots[lead].items():
                nv = work.get(k, 0) - f * v
                if nv != 0:
                    work[k] = nv
                else:
                    work.pop(k, None)
        for g, c in work.items():
            out[(j, g)] = c
    return DiffPoly(out, p.names)

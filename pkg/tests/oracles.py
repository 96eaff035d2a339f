"""Independent reference computations used by several test modules."""
import math

import numpy as np

from dnls_gibbs.wick import S4, MomentSpec, wick_moment


def quadruples(k, M, N):
    """Index quadruples of f_N - f_M with their coefficients n1^k m1^(k-1)."""
    out = []
    r = range(-N, N + 1)
    for m1 in r:
        for m2 in r:
            for n1 in r:
                n2 = m1 + m2 - n1
                if abs(n2) <= N and max(abs(m1), abs(m2), abs(n1), abs(n2)) > M:
                    out.append((m1, m2, n1, n2, float(n1 ** k * m1 ** (k - 1))))
    return out


def distance_by_moments(k, M, N):
    """E|f_N - f_M|^2 expanded into fourth moments, each evaluated with wick_moment."""
    qs = quadruples(k, M, N)
    total = []
    for m1, m2, n1, n2, c in qs:
        left = sorted((m1, m2))
        for p1, p2, q1, q2, c2 in qs:
            # conj(term') has conj modes q1, q2 and modes p1, p2
            if sorted(left + [q1, q2]) != sorted([n1, n2, p1, p2]):
                continue
            total.append(c * c2 * wick_moment(MomentSpec((m1, m2, q1, q2), (n1, n2, p1, p2), k)))
    return math.fsum(total)


def distance_by_grid(k, M, N):
    """Full S4 sum on the 4D index grid with Kronecker deltas as masks."""
    r = np.arange(-N, N + 1)
    n = np.meshgrid(r, r, r, r, indexing="ij")
    f = [x.astype(float) for x in n]
    w = [1 / (1 + np.abs(x) ** k) ** 2 for x in f]
    den = w[0] * w[1] * w[2] * w[3]
    parts = []
    for s in S4:
        m = [n[s[i]] for i in range(4)]
        mask = (n[0] + n[1] == m[0] + m[1])
        mask &= np.maximum.reduce([abs(m[0]), abs(m[1]), abs(n[0]), abs(n[1])]) > M
        mask &= np.maximum.reduce([abs(m[2]), abs(m[3]), abs(n[2]), abs(n[3])]) > M
        num = f[0] ** k * f[s[0]] ** (k - 1) * f[2] ** (k - 1) * f[s[2]] ** k
        parts.append(math.fsum((num * den)[mask]))
    return math.fsum(parts)

from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from dnls_gibbs.diffpoly import AB, DiffPoly
from dnls_gibbs.hierarchy import generate
from dnls_gibbs.rational import make

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

small = st.integers(-4, 4)
coeffs = st.builds(lambda p, q, r: make(Fraction(p, q), Fraction(r, q)), small, st.integers(1, 3), small)
generators = st.tuples(st.integers(0, 1), st.integers(0, 3))
monomial_keys = st.tuples(st.integers(0, 2), st.lists(generators, min_size=0, max_size=3).map(lambda g: tuple(sorted(g))))


@st.composite
def diffpolys(draw, names=AB, constant=True, max_terms=4):
    terms = draw(st.dictionaries(monomial_keys, coeffs, max_size=max_terms))
    if not constant:
        terms = {k: c for k, c in terms.items() if k[1]}
    return DiffPoly(terms, names)


@pytest.fixture(scope="session")
def ladder():
    return generate(10)

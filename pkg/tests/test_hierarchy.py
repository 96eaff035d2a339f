from fractions import Fraction

import pytest
from conftest import diffpolys
from hypothesis import given, settings

from dnls_gibbs.diffpoly import AB, PSI, DiffPoly, DiffPolyVector, beta, functional_eq, order, symbols
from dnls_gibbs.errors import MalformedRung
from dnls_gibbs.hierarchy import (
    HierarchyEntry, compare_printed, leading_term_check, entry_from_json, from_complex, generate, grading_problems,
    involution_holds, lenard_magri_step, load_golden, printed_integrals, q_decomposition, rung_to_json,
    seed_entries, template_residual, to_complex,
)
from dnls_gibbs.rational import QQi

a, b = symbols(AB)
psi, psib = symbols(PSI)
B = beta(AB)
Bp = beta(PSI)
I = QQi(Fraction(0), Fraction(1))


def test_step_from_xi0_gives_xi1():
    r2 = a * a + b * b
    e0 = seed_entries()[0]
    assert lenard_magri_step(e0).xi == DiffPolyVector([b.d() + B * a * r2, -a.d() + B * b * r2])


def test_step_from_xi1_linear_part():
    xi2 = lenard_magri_step(seed_entries()[1]).xi
    assert xi2.coefficient_of_beta(0) == DiffPolyVector([-a.d(2), -b.d(2)])


def test_first_two_densities():
    e0, e1 = generate(1)
    assert e0.h == (a * a + b * b) / 2
    assert functional_eq(e1.h, a * b.d() + B * (a * a + b * b) ** 2 / 4)


def test_h2_matches_printed_list():
    h2 = to_complex(generate(2)[2].h)
    printed = psi.d() * psib.d() / 2 + I * Fraction(3, 2) * Bp * psi * psi * psib * psib.d() \
        + Bp * Bp * (psi * psib) ** 3 / 4
    assert functional_eq(h2, printed)


def test_h2_beta_linear_coefficient_is_three_quarters():
    h2 = to_complex(generate(2)[2].h)
    expected = psi.d() * psib.d() / 2 + I * Fraction(3, 4) * Bp * psi * psi * psib * psib.d() \
        + Bp * Bp * (psi * psib) ** 3 / 4
    assert functional_eq(h2, expected)


def test_printed_comparison_isolates_differences(ladder):
    report = compare_printed(ladder)
    assert set(report) == set(printed_integrals())
    for n, (same, diff) in report.items():
        assert same == (not diff)
        if not same:
            assert functional_eq(to_complex(ladder[n].h), printed_integrals()[n] + diff)


def test_h4_leading_coefficient(ladder):
    assert q_decomposition(ladder, 2).leading_coeff == {1: QQi(Fraction(0), Fraction(5, 2))}


def test_h4_agrees_with_printed_form(ladder):
    assert compare_printed(ladder)[4][0]


def test_to_complex_examples():
    assert to_complex(a * a + b * b) == psi * psib
    expected = (psi * psib.d() - psib * psi.d() + psib * psib.d() - psi * psi.d()) * I / 4
    assert to_complex(a * b.d()) == expected


@given(diffpolys())
@settings(max_examples=100)
def test_complex_round_trip(p):
    assert from_complex(to_complex(p)) == p


def test_q1_functional():
    q = q_decomposition(generate(2), 1).q
    expected = I * Fraction(3, 4) * Bp * psib.d() * psib * psi * psi + Bp * Bp * (psi * psib) ** 3 / 4
    assert functional_eq(q, expected)


def test_malformed_rung():
    zero = DiffPoly()
    entries = [HierarchyEntry.build(2, zero, DiffPolyVector([zero, zero]))]
    with pytest.raises(MalformedRung):
        q_decomposition(entries, 1)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_leading_coefficients(ladder, k):
    expected = Fraction(3, 4) if k == 1 else Fraction(2 * k + 1, 2)
    assert q_decomposition(ladder, k).leading_coeff == {1: QQi(Fraction(0), expected)}


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_leading_term_structure(ladder, k):
    ok, rem = leading_term_check(ladder, k)
    assert ok, rem.to_text()


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_ptilde_solution_exists(ladder, k):
    assert q_decomposition(ladder, k).ptilde is not None


@pytest.mark.parametrize("n", range(11))
def test_gradings(ladder, n):
    assert grading_problems(ladder[n]) == []


@pytest.mark.parametrize("n", range(11))
def test_xi_is_variational_derivative(ladder, n):
    e = ladder[n]
    assert order(e.xi) == n
    assert e.p == e.xi.d()


@pytest.mark.parametrize("n", range(2, 8))
def test_template_match(ladder, n):
    res, allowed, ok = template_residual(ladder, n)
    assert ok, f"residual order {order(res)} > {allowed}"


@pytest.mark.parametrize("m,n", [(m, n) for m in range(5) for n in range(5) if m <= n])
def test_involution_low_rungs(ladder, m, n):
    assert involution_holds(ladder, m, n)


@pytest.mark.parametrize("n", range(5))
def test_golden_files(ladder, n):
    assert rung_to_json(ladder[n]) == load_golden(n)


@pytest.mark.parametrize("n", range(5))
def test_json_round_trip(ladder, n):
    e = entry_from_json(load_golden(n))
    assert e.h == ladder[n].h and e.xi == ladder[n].xi


def test_generate_is_cached():
    assert generate(3)[3] is generate(5)[3]

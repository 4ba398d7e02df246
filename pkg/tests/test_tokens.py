import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from postdyn.tokens import (
    FAMILIES,
    PolySeq,
    binomial_from_token,
    h_symbol_coeffs,
    load_coeff_csv,
    standard_token,
    token_from_binomial,
    verify_binomial_identity,
    verify_token_identity,
)

F = Fraction


def seq_with_perturbed_q2(base: PolySeq, delta=F(1)) -> PolySeq:
    rows = list(base.coeffs)
    q2 = list(rows[2])
    q2[0] += delta
    rows[2] = tuple(q2)
    return PolySeq("perturbed", (), tuple(rows))


# ------------------------------------------------------- construction


def test_exponential_monomial_coeffs():
    seq = standard_token("exponential-monomial", 3)
    assert seq.coeffs == (
        (F(1),),
        (F(0), F(1)),
        (F(0), F(0), F(1, 2)),
        (F(0), F(0), F(0), F(1, 6)),
    )


def test_falling_factorial_coeffs():
    seq = standard_token("falling-factorial", 2)
    assert seq.coeffs[1] == (F(0), F(1))
    assert seq.coeffs[2] == (F(0), F(-1, 2), F(1, 2))  # x(x-1)/2


def test_abel_coeffs():
    seq = standard_token("abel", 2, param=F(1))
    assert seq.coeffs[2] == (F(0), F(-1), F(1, 2))  # x(x-2)/2


def test_degree_invariant_enforced():
    for family in FAMILIES:
        seq = standard_token(family, 8)
        for n, row in enumerate(seq.coeffs):
            assert len(row) == n + 1 and row[-1] != 0
    with pytest.raises(ValueError):
        PolySeq("bad", (), ((F(1),), (F(1), F(0))))


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        standard_token("laguerre", 4)


def test_sympy_oracle_for_family_tables():
    x = sympy.symbols("x")
    n_max = 6
    oracles = {
        "exponential-monomial": lambda n: x**n / sympy.factorial(n),
        "falling-factorial": lambda n: sympy.ff(x, n) / sympy.factorial(n),
        "rising-factorial": lambda n: sympy.rf(x, n) / sympy.factorial(n),
    }
    for family, q_n in oracles.items():
        seq = standard_token(family, n_max)
        for n in range(n_max + 1):
            poly = sympy.Poly(sympy.expand(q_n(n)), x)
            expected = [F(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
            expected += [F(0)] * (n + 1 - len(expected))
            assert list(seq.coeffs[n]) == expected, (family, n)


# ----------------------------------------------------------- identity


@pytest.mark.parametrize("family", FAMILIES)
def test_token_identity_families(family):
    seq = standard_token(family, 10)
    report = verify_token_identity(seq)
    assert report.passed
    assert report.n_max == 10
    assert report.to_json_obj()["pass"] is True


def test_token_identity_fails_on_perturbation():
    base = standard_token("exponential-monomial", 6)
    report = verify_token_identity(seq_with_perturbed_q2(base))
    assert not report.passed
    first = report.failures[0]
    assert first.n == 2
    assert first.monomial == "x^0 y^0"
    assert (first.lhs, first.rhs) == (F(1), F(2))
    obj = report.to_json_obj()
    assert obj["failures"][0] == {"n": 2, "monomial": "x^0 y^0", "lhs": "1", "rhs": "2"}


def test_binomial_from_token_gives_monomials():
    seq = binomial_from_token(standard_token("exponential-monomial", 4))
    assert seq.coeffs[3] == (F(0), F(0), F(0), F(1))


def test_binomial_from_token_gives_falling_factorials():
    seq = binomial_from_token(standard_token("falling-factorial", 3))
    assert seq.coeffs[3] == (F(0), F(2), F(-3), F(1))  # x(x-1)(x-2)


def test_token_binomial_round_trip():
    for family in FAMILIES:
        seq = standard_token(family, 7)
        assert token_from_binomial(binomial_from_token(seq)) == seq


@pytest.mark.parametrize("family", FAMILIES)
def test_binomial_identity_families(family):
    seq = binomial_from_token(standard_token(family, 10))
    assert verify_binomial_identity(seq).passed


def test_identity_equivalence_on_failure():
    base = standard_token("falling-factorial", 5)
    bad = seq_with_perturbed_q2(base)
    assert not verify_token_identity(bad).passed
    assert not verify_binomial_identity(binomial_from_token(bad)).passed


small_fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)


@settings(deadline=None, max_examples=80)
@given(
    st.lists(small_fractions, min_size=1, max_size=4),
    st.data(),
)
def test_identity_checks_are_equivalent(leadings, data):
    # random exact sequences: the token check and the binomial check on the
    # n!-scaled sequence must agree, pass or fail
    rows = []
    for n, lead in enumerate(leadings):
        if lead == 0:
            lead = F(1)
        lower = data.draw(
            st.lists(small_fractions, min_size=n, max_size=n), label=f"q_{n} tail"
        )
        rows.append(tuple(lower) + (lead,))
    seq = PolySeq("random", (), tuple(rows))
    token_ok = verify_token_identity(seq).passed
    binom_ok = verify_binomial_identity(binomial_from_token(seq)).passed
    assert token_ok == binom_ok


# ------------------------------------------------------------ h-symbol


def test_h_symbol_examples():
    assert h_symbol_coeffs(standard_token("exponential-monomial", 4), 4) == [
        F(0), F(1), F(0), F(0), F(0),
    ]
    assert h_symbol_coeffs(standard_token("falling-factorial", 3), 3) == [
        F(0), F(1), F(-1, 2), F(1, 3),
    ]


def test_h_symbol_first_entry_zero():
    for family in FAMILIES:
        assert h_symbol_coeffs(standard_token(family, 3), 3)[0] == 0


def test_h_symbol_against_sympy_derivative():
    x = sympy.symbols("x")
    cases = {
        "exponential-monomial": lambda k: x**k / sympy.factorial(k),
        "falling-factorial": lambda k: sympy.ff(x, k) / sympy.factorial(k),
    }
    for family, q_k in cases.items():
        ours = h_symbol_coeffs(standard_token(family, 8), 8)
        for k in range(9):
            d = sympy.diff(q_k(k), x).subs(x, 0)
            d = sympy.Rational(d)
            assert ours[k] == F(int(d.p), int(d.q)), (family, k)


def test_h_symbol_scales_with_token_normalisation():
    binom = binomial_from_token(standard_token("rising-factorial", 6))
    h_binom = h_symbol_coeffs(binom, 6)
    h_token = h_symbol_coeffs(token_from_binomial(binom), 6)
    for k in range(7):
        assert h_token[k] == h_binom[k] / math.factorial(k)


def test_h_symbol_requires_enough_degrees():
    with pytest.raises(ValueError):
        h_symbol_coeffs(standard_token("abel", 3), 5)


# ----------------------------------------------------------------- csv


def test_csv_import_round_trip():
    seq = standard_token("falling-factorial", 4)
    lines = ["n,c0,c1,..."]
    for n, row in enumerate(seq.coeffs):
        lines.append(",".join([str(n)] + [str(c) for c in row]))
    loaded = load_coeff_csv("\n".join(lines))
    assert loaded.coeffs == seq.coeffs
    assert verify_token_identity(loaded).passed


def test_csv_import_errors():
    with pytest.raises(ValueError):
        load_coeff_csv("0,1\n2,0,0,1")  # gap at n=1
    with pytest.raises(ValueError):
        load_coeff_csv("0,1,2")  # wrong arity
    with pytest.raises(ValueError):
        load_coeff_csv("0,1\n0,2")  # duplicate
    with pytest.raises(ValueError):
        load_coeff_csv("")


def test_evaluate_horner():
    seq = standard_token("falling-factorial", 3)
    assert seq.evaluate(3, F(5)) == F(5 * 4 * 3, 6)

"""Tests for layer-quotient orders of torsion modules, growth-law fitting,
and the linear relations between invariants."""

import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from iwalog.growth import (
    CodescentData,
    ElementaryModule,
    InconsistentSequenceError,
    InfiniteQuotientError,
    InvariantRelations,
    InvariantTriple,
    NegativeLambdaError,
    PrecisionSaturatedError,
    check_relations,
    codescent_quotient,
    cyclotomic_factor_difference,
    fit_invariants,
    fit_with_known_mu,
    gold_lambda,
    quotient_order_exponent,
    quotient_order_snf,
)
from iwalog.series import (
    DistinguishedPoly,
    LambdaElem,
    ZeroSeriesError,
    omega_quotient,
)


def P(ell, *coeffs):
    return DistinguishedPoly(ell, coeffs)


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------


def test_elementary_module_invariants():
    m = ElementaryModule(3, (1, 2), (P(3, 3, 1), P(3, 3, 3, 1)))
    assert m.mu == 3
    assert m.lam == 3
    with pytest.raises(ValueError):
        ElementaryModule(3, (0,), ())
    with pytest.raises(ValueError):
        ElementaryModule(3, (), (P(5, 5, 1),))  # mixed primes
    with pytest.raises(ValueError):
        ElementaryModule(3, (), ((3, 1),))  # bare tuple is not a polynomial


def test_codescent_data_validation():
    data = CodescentData(P(3, -3, 1), ((1,),))
    assert data.ell == 3
    assert data.aux_generators == ((1,),)
    with pytest.raises(ValueError):
        CodescentData(P(3, -3, 1), ((1, 0),))  # wrong generator length


def test_invariant_triple_accessors():
    t = InvariantTriple(1, 2, -1, 0)
    assert t.astuple() == (1, 2, -1, 0)
    assert t.exponent_at(2, 3) == 1 * 9 + 2 * 2 - 1
    assert t.to_json_dict() == {"mu": "1", "lambda": "2", "nu": "-1", "n0": "0"}


def test_invariant_relations_round_trip():
    rec = InvariantRelations.from_dict({"mu": 0, "lambda": 2, "mu_tilde": 0})
    assert rec.lambda_ == 2
    assert rec.as_dict() == {"mu": 0, "lambda": 2, "mu_tilde": 0}
    with pytest.raises(ValueError):
        InvariantRelations.from_dict({"sigma": 1})


# ---------------------------------------------------------------------------
# layer-quotient orders: exact route
# ---------------------------------------------------------------------------


def test_quotient_exponent_frozen_linear_factor():
    # Lambda/(T - 3): |quotient at layer n| = |(1+3)^(3^n) - 1| at 3,
    # giving exponents 1, 2, 3, ...
    m = ElementaryModule(3, (), (P(3, -3, 1),))
    assert [quotient_order_exponent(m, n) for n in (0, 1, 2, 3)] == [1, 2, 3, 4]


def test_quotient_exponent_ell_power_blocks():
    # Lambda/(ell**m) contributes m * ell**n exactly
    m = ElementaryModule(3, (2,), ())
    assert [quotient_order_exponent(m, n) for n in (0, 1, 2)] == [2, 6, 18]
    mixed = ElementaryModule(3, (2,), (P(3, -3, 1),))
    assert quotient_order_exponent(mixed, 2) == 18 + 3


def test_quotient_exponent_degree_zero_part_is_free():
    m = ElementaryModule(3, (), (P(3, 1),))
    assert quotient_order_exponent(m, 4) == 0


def test_quotient_exponent_infinite():
    m = ElementaryModule(3, (), (P(3, 0, 1),))  # T divides every omega_n
    with pytest.raises(InfiniteQuotientError):
        quotient_order_exponent(m, 1)
    with pytest.raises(ValueError):
        quotient_order_exponent(m, -1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_quotient_exponent_matches_resultant(n):
    # independent route: the polynomial-block exponent is the ell-valuation
    # of the resultant Res(P, omega_n)
    T = sympy.symbols("T")
    for coeffs in [(-3, 1), (3, 6, 1), (9, 3, 1)]:
        m = ElementaryModule(3, (), (P(3, *coeffs),))
        p_sym = sympy.Poly(list(reversed(coeffs)), T)
        w_sym = sympy.Poly([1] + [0] * (3**n - 1) + [-1], T).compose(
            sympy.Poly([1, 1], T)
        )  # omega_n = (1+T)^(3^n) - 1
        res = int(sympy.resultant(p_sym, w_sym))
        expected = 0
        while res % 3 == 0:
            res //= 3
            expected += 1
        assert quotient_order_exponent(m, n) == expected


# ---------------------------------------------------------------------------
# layer-quotient orders: elementary-divisor route
# ---------------------------------------------------------------------------


def test_snf_route_agrees_with_exact_route():
    modules = [
        ElementaryModule(3, (), (P(3, -3, 1),)),
        ElementaryModule(3, (1,), (P(3, 3, 3, 3, 1),)),
        ElementaryModule(3, (2, 1), ()),
        ElementaryModule(5, (), (P(5, 5, 10, 1), P(5, -5, 1))),
        ElementaryModule(7, (1,), (P(7, 7, 1),)),
    ]
    for m in modules:
        for n in range(0, 4):
            assert quotient_order_snf(m, n) == quotient_order_exponent(m, n), (m, n)


def test_snf_route_escalates_past_default_modulus():
    # (T-3)^6 at layer 5 has exponent 6*6 = 36 > 32 - guard, forcing the
    # schedule to escalate; a pinned precision of 32 must refuse instead.
    poly = P(3, -3, 1)
    sixth = poly * poly * poly * poly * poly * poly
    m = ElementaryModule(3, (), (sixth,))
    assert quotient_order_exponent(m, 5) == 36
    assert quotient_order_snf(m, 5) == 36
    with pytest.raises(PrecisionSaturatedError):
        quotient_order_snf(m, 5, prec=32)


def test_snf_route_detects_infinite_quotient():
    m = ElementaryModule(3, (), (P(3, 0, 1),))
    with pytest.raises(InfiniteQuotientError):
        quotient_order_snf(m, 2)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from((3, 5)),
    st.integers(min_value=0, max_value=2),
    st.lists(st.integers(min_value=-2, max_value=2), min_size=1, max_size=2),
    st.integers(min_value=0, max_value=2),
)
def test_snf_route_random_agreement(ell, m_exp, lows, n):
    coeffs = tuple(ell * c for c in lows) + (1,)
    if coeffs[0] == 0:
        coeffs = (ell,) + coeffs[1:]
    module = ElementaryModule(ell, (m_exp,) if m_exp else (), (P(ell, *coeffs),))
    try:
        exact = quotient_order_exponent(module, n)
    except InfiniteQuotientError:
        with pytest.raises(InfiniteQuotientError):
            quotient_order_snf(module, n)
        return
    assert quotient_order_snf(module, n) == exact


# ---------------------------------------------------------------------------
# codescent quotients
# ---------------------------------------------------------------------------


def test_codescent_frozen_values():
    # C = Lambda/(T-3) is Z_3 with T acting as 3; all hand-checkable.
    # No generators: Y_n = omega_n*C, and v_3(4^(3^n)-1) = n+1.
    assert codescent_quotient(CodescentData(P(3, -3, 1), ()), 1) == 2
    # With 1 as a generator Y_0 = C, so C/Y_n drops by the layer-0 exponent.
    assert codescent_quotient(CodescentData(P(3, -3, 1), ((1,),)), 1) == 1
    assert codescent_quotient(CodescentData(P(3, -3, 1), ((1,),)), 0) == 0
    # degree-2 module where the generator plus T*C already fill layer zero
    assert codescent_quotient(CodescentData(P(3, 3, 3, 1), ((1, 0),)), 0) == 0
    assert codescent_quotient(CodescentData(P(3, 1), ()), 3) == 0  # rank-0 module


def test_codescent_infinite_without_generators():
    # C = Lambda/(T) is Z_3 with T acting as 0, so omega_n*C = 0: the
    # quotient is infinite unless the auxiliary generators span.
    with pytest.raises(InfiniteQuotientError):
        codescent_quotient(CodescentData(P(3, 0, 1), ()), 1)
    # with 1 as a generator, Y_n = (omega_n/omega_0)(0) * Z_3 = 3^n Z_3
    assert codescent_quotient(CodescentData(P(3, 0, 1), ((1,),)), 0) == 0
    assert codescent_quotient(CodescentData(P(3, 0, 1), ((1,),)), 1) == 1
    assert codescent_quotient(CodescentData(P(3, 0, 1), ((1,),)), 2) == 2


def test_codescent_base_layer_telescoping():
    # expanding Y_n through any intermediate layer gives the same quotient
    data = CodescentData(P(3, 9, 3, 1), ((1, 1),))
    for n in range(0, 4):
        values = {codescent_quotient(data, n, base_layer=d) for d in range(0, n + 1)}
        assert len(values) == 1, (n, values)


def test_codescent_validates_layers():
    data = CodescentData(P(3, -3, 1), ())
    with pytest.raises(ValueError):
        codescent_quotient(data, 1, base_layer=2)


def test_snf_dispatches_codescent_data():
    data = CodescentData(P(3, -3, 1), ())
    assert quotient_order_snf(data, 1) == codescent_quotient(data, 1)


# ---------------------------------------------------------------------------
# fitting growth laws
# ---------------------------------------------------------------------------


def test_fit_invariants_frozen():
    assert fit_invariants((1, 2, 3), 3).astuple() == (0, 1, 1, 0)
    assert fit_invariants((2, 3, 4), 3).astuple() == (0, 1, 2, 0)
    assert fit_invariants((3, 5, 7), 3).astuple() == (0, 2, 3, 0)
    assert fit_invariants((0, 0, 0), 3).astuple() == (0, 0, 0, 0)
    # mu = 1 switches on: e_n = 3^n + n - 2 from layer 1 on
    assert fit_invariants((2, 2, 9, 28), 3).astuple() == (1, 1, -2, 1)


def test_fit_invariants_prefers_longer_tail():
    # (1, 4, 6): the mu-route through the last three points fits only two
    # of them; the linear tail (lambda=2) fits from layer 1
    assert fit_invariants((1, 4, 6), 3).astuple() == (0, 2, 2, 1)


def test_fit_invariants_errors():
    with pytest.raises(ValueError):
        fit_invariants((1, 2), 3)
    with pytest.raises(InconsistentSequenceError):
        fit_invariants((0, 5, 0), 3)


@given(
    st.sampled_from((3, 5)),
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=0, max_value=4),
    st.integers(min_value=-3, max_value=3),
)
def test_fit_invariants_recovers_exact_laws(ell, mu, lam, nu):
    e = [mu * ell**n + lam * n + nu for n in range(4)]
    fit = fit_invariants(e, ell)
    assert (fit.mu, fit.lambda_, fit.nu) == (mu, lam, nu)
    assert fit.n0 == 0


def test_fit_with_known_mu_frozen():
    assert fit_with_known_mu((0, 3), 3, 1).astuple() == (1, 1, -1, 0)
    assert fit_with_known_mu((1, 3), 3, 1).astuple() == (1, 0, 0, 0)
    assert fit_with_known_mu((0, 4), 3, 1).astuple() == (1, 2, -1, 0)


def test_fit_with_known_mu_rejects_shrinking_growth():
    with pytest.raises(NegativeLambdaError):
        fit_with_known_mu((3, 3), 3, 1)


def test_fit_with_known_mu_stabilization_layer():
    # (0, 1, 3) is linear with slope 2 only from layer 1 on
    assert fit_with_known_mu((0, 1, 3), 3, 0, stabilization_layer=1).astuple() == (0, 2, -1, 1)
    with pytest.raises(InconsistentSequenceError):
        fit_with_known_mu((0, 1, 3), 3, 0, stabilization_layer=0)
    with pytest.raises(ValueError):
        fit_with_known_mu((0, 1, 3), 3, 0, stabilization_layer=3)
    with pytest.raises(ValueError):
        fit_with_known_mu((0, 1), 3, -1)
    with pytest.raises(ValueError):
        fit_with_known_mu((0,), 3, 0)


def test_gold_lambda_frozen():
    # increments 3, 2: phi(3) = 2 is not beaten at n=1, phi(9) = 6 beats 2
    assert gold_lambda((0, 3, 5), 3) == 2
    assert gold_lambda((0, 1), 3) == 1
    assert gold_lambda((0, 2), 3) is None  # increment 2 is not below phi(3)
    assert gold_lambda((5,), 3) is None
    assert gold_lambda((0, 4, 24), 5) is None


# ---------------------------------------------------------------------------
# invariant relations
# ---------------------------------------------------------------------------

FULL_RECORD = {
    "mu": 0, "lambda": 2,
    "mu_prime": 0, "lambda_prime": 2,
    "mu_ell": 0, "lambda_ell": 0,
    "mu_tilde": 0, "lambda_tilde": 2, "lambda_tilde_ell": 0,
    "mu_star": 0, "lambda_star": 3,
}


def test_check_relations_full_record_passes():
    report = check_relations(InvariantRelations.from_dict(FULL_RECORD))
    assert len(report) == 6
    assert all(entry["pass"] for entry in report)
    texts = [entry["relation"] for entry in report]
    assert "lambda_star == lambda_tilde + 1" in texts


def test_check_relations_skips_missing_operands():
    report = check_relations(InvariantRelations.from_dict({"mu": 0, "mu_tilde": 0}))
    assert [entry["relation"] for entry in report] == ["mu == mu_tilde"]
    assert report[0]["pass"]
    assert check_relations(InvariantRelations()) == []


@pytest.mark.parametrize("field", sorted(FULL_RECORD))
def test_check_relations_detects_any_perturbation(field):
    data = dict(FULL_RECORD)
    data[field] += 1
    report = check_relations(InvariantRelations.from_dict(data))
    assert any(not entry["pass"] for entry in report), field


def test_check_relations_reports_operands():
    report = check_relations(InvariantRelations.from_dict({"mu_star": 1, "mu_tilde": 0}))
    entry = report[0]
    assert entry["operands"] == {"mu_star": 1, "mu_tilde": 0}
    assert entry["actual"] == 1 and entry["expected"] == 0
    assert not entry["pass"]


# ---------------------------------------------------------------------------
# cyclotomic factor comparison
# ---------------------------------------------------------------------------


def test_cyclotomic_factor_difference_cases():
    chi = P(3, -3, 1).to_lambda(prec=10, order=12)
    w0 = LambdaElem.from_ints((0, 1), 3, 10, 12)  # omega_0 = T
    level1 = omega_quotient(1, 0, 3, prec=10, order=12)

    assert cyclotomic_factor_difference(chi, chi) == []
    assert cyclotomic_factor_difference(chi * w0, chi) == [(0, 1)]
    assert cyclotomic_factor_difference(chi, chi * w0 * w0) == [(0, 2)]
    assert cyclotomic_factor_difference(chi * level1, chi) == [(1, 1)]
    assert cyclotomic_factor_difference(chi * w0 * level1, chi) == [(0, 1), (1, 1)]
    # a non-cyclotomic extra factor is not explained
    assert cyclotomic_factor_difference(chi * chi, chi) is None
    # differing ell-power parts are never unit-times-cyclotomic
    assert cyclotomic_factor_difference(chi.scale(3), chi) is None


def test_cyclotomic_factor_difference_ignores_units():
    chi = P(3, -3, 1).to_lambda(prec=10, order=12)
    unit = LambdaElem.from_ints((2, 7, 1), 3, 10, 12)
    w0 = LambdaElem.from_ints((0, 1), 3, 10, 12)
    assert cyclotomic_factor_difference(chi * w0 * unit, chi) == [(0, 1)]


def test_cyclotomic_factor_difference_validation():
    chi = P(3, -3, 1).to_lambda(prec=8, order=10)
    with pytest.raises(ValueError):
        cyclotomic_factor_difference(chi, P(5, -5, 1).to_lambda(prec=8, order=10))
    with pytest.raises(ZeroSeriesError):
        cyclotomic_factor_difference(chi, LambdaElem.zero(3, 8, 10))


# ---------------------------------------------------------------------------
# dual-route stress sample (small version of the acceptance workload)
# ---------------------------------------------------------------------------


def test_dual_route_and_fit_on_random_modules():
    rng = random.Random(1723)
    checked = 0
    while checked < 25:
        ell = rng.choice((3, 5))
        ell_parts = tuple(rng.randint(1, 2) for _ in range(rng.randint(0, 2)))
        polys = []
        for _ in range(rng.randint(0, 2)):
            deg = rng.randint(1, 2)
            coeffs = [ell * rng.randint(-3, 3) for _ in range(deg)] + [1]
            if coeffs[0] == 0:
                coeffs[0] = ell
            polys.append(P(ell, *coeffs))
        module = ElementaryModule(ell, ell_parts, tuple(polys))
        try:
            exponents = [quotient_order_exponent(module, n) for n in range(6)]
        except InfiniteQuotientError:
            continue  # the random polynomial hit a cyclotomic factor
        for n, exact in enumerate(exponents):
            assert quotient_order_snf(module, n) == exact
        fit = fit_invariants(exponents, ell)
        assert (fit.mu, fit.lambda_) == (module.mu, module.lam)
        checked += 1

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from tentsio.errors import ParameterError
from tentsio.exponents import (INF, ExponentInputs, Interval, M_q, as_exponent, boundary_q,
                               conjugate, cor56_pL, dual_threshold, equivalence_chain, golden_rows,
                               invariant_sweep, p_c, p_c_dual, p_M, prop36_range, prop42_range,
                               preset, thm31_range, thm41_range, tilde_p_c, v)

# Published ranges, typed from the proposition statements:
# (lower, lower_is_eps_limit, upper, upper_closed, upper_is_eps_limit)
GOLDEN = {
    "prop14-heat": {n: (F(n, n + 1), False, INF, True, False) for n in range(1, 7)},
    "prop14-sqrt": {n: (F(n, n + 1), False, INF, True, False) for n in range(1, 7)},
    "prop15": {n: (F(n, n + 1), False, INF, True, False) for n in range(1, 7)},
    "prop16": {
        1: (F(1, 2), False, INF, True, False),
        2: (F(2, 3), False, INF, True, False),
        3: (F(6, 7), True, INF, True, False),
        4: (F(1), True, INF, True, False),
        5: (F(6, 5), True, INF, True, False),
        6: (F(4, 3), True, INF, True, False),
    },
    "prop17": {
        1: (F(1, 2), False, INF, True, False),
        2: (F(2, 3), False, INF, True, False),
        3: (F(6, 7), True, INF, True, False),
        4: (F(1), True, INF, True, False),
        5: (F(6, 5), True, F(6), False, True),
        6: (F(4, 3), True, F(4), False, True),
    },
}


rationals = st.fractions(min_value=-5, max_value=F(49, 50), max_denominator=50)
q_low = st.fractions(min_value=1, max_value=2, max_denominator=60)
dims = st.integers(1, 10)
homog = st.fractions(min_value=F(1, 4), max_value=4, max_denominator=8).filter(lambda x: x > 0)


# ---------------------------------------------------------------- basics


def test_parsing_and_conjugates():
    assert as_exponent("6/5") == F(6, 5)
    assert as_exponent("inf") is INF
    assert as_exponent(3) == 3
    with pytest.raises(ParameterError):
        as_exponent(0.3)
    with pytest.raises(ParameterError):
        as_exponent("abc")
    assert conjugate(1) is INF
    assert conjugate(INF) == 1
    assert conjugate(2) == 2
    assert conjugate(F(6, 5)) == 6
    assert F(3) < INF and INF > F(10 ** 9) and not INF < F(1)


def test_p_M_examples():
    assert p_M(1, 1, F(3, 2)) == F(1, 2)
    assert p_M(3, 1, 2) == F(6, 7)
    assert p_M(2, 2, INF) == 0
    with pytest.raises(ParameterError):
        p_M(1, 1, 0)


def test_p_c_examples():
    assert p_c(5, 2, 0, 2) == F(10, 7)
    assert p_c(5, 2, 0, conjugate(F(10, 3))) == F(6, 5) == 2 - F(4, 5)
    assert p_c(3, 1, 0, 1) == 0
    with pytest.raises(ParameterError):
        p_c(1, 1, 1, F(3, 2))
    with pytest.raises(ParameterError):
        p_c(1, 1, 0, 3)


def test_tilde_p_c_examples():
    for n in range(1, 6):
        assert tilde_p_c(n, 2, 0, 2) == F(2 * n, n + 2)
    assert tilde_p_c(3, 2, 0, F(6, 5)) == F(6, 7)
    assert tilde_p_c(1, 1, -1, 1) == F(1, 2)


def test_M_q_and_v():
    assert M_q(1, 4, 2, 2) == 1
    assert M_q(1, 3, 1, F(6, 5)) == 2
    assert M_q(1, 3, 1, INF) == F(5, 2)
    for n, m, beta in [(1, 1, 0), (3, 2, F(-1, 2)), (2, F(1, 2), F(1, 3))]:
        assert v(0, 2, n, m, beta) == (1 - F(beta)) / 2


@given(dims, homog, rationals)
def test_p_c_one_iff_threshold(n, m, beta):
    qb = boundary_q(n, m, beta)
    if qb is not None:
        assert p_c(n, m, beta, qb) == 1
        assert conjugate(qb) == dual_threshold(n, m, beta)


# ---------------------------------------------------------------- ranges


def test_thm31_examples():
    r = thm31_range(ExponentInputs(3, 2, 0, F(6, 5), INF))
    assert r.case_tag == "thm31-case2" and str(r.interval) == "(6/7, 2]"
    r = thm31_range(ExponentInputs(5, 2, 0, conjugate(F(10, 3)), INF))
    assert r.case_tag == "thm31-case1" and r.interval.lower.value == F(6, 5)
    r = thm31_range(ExponentInputs(1, 2, 0, 1, INF))
    assert r.case_tag == "thm31-case2" and r.interval.lower.value == F(1, 2)
    assert r.interval.upper.closed and not r.interval.lower.closed


def test_thm31_hypotheses():
    assert not thm31_range(ExponentInputs(1, 1, 0, F(3, 2), F(1, 2))).ok
    assert not thm31_range(ExponentInputs(1, 1, 1, F(3, 2), INF)).ok
    assert not thm31_range(ExponentInputs(1, 1, 0, 3, INF)).ok
    rep = thm31_range(ExponentInputs(1, 1, 0, F(3, 2), F(1, 2)))
    assert rep.case_tag.endswith("hypothesis") and "hypothesis-violation" in rep.tags


def test_prop36_examples():
    r = prop36_range(1, 1, 0, 1, F(3, 2))
    assert str(r.interval) == "(1/2, 2)"
    assert not prop36_range(1, 1, 0, 1, F(1, 2)).ok
    assert not prop36_range(1, 1, -1, 1, F(3, 2)).ok


def test_thm41_examples():
    for beta in (F(-1, 2), 0, F(9, 10)):
        r = thm41_range(ExponentInputs(3, 2, beta, INF, INF))
        assert r.case_tag == "thm41-case2" and str(r.interval) == "[2, inf]"
    r = thm41_range(ExponentInputs(2, 2, 0, 2, INF))
    assert r.case_tag == "thm41-case1"
    assert r.values["p_c"] == 1 and r.interval.upper.value is INF and not r.interval.upper.closed
    assert r.tags
    r = thm41_range(ExponentInputs(5, 2, 0, 3, INF))
    assert r.case_tag == "thm41-case1" and r.interval.upper.value == conjugate(F(20, 16))
    assert not thm41_range(ExponentInputs(2, 2, -1, 4, INF)).ok


def test_prop42():
    assert str(prop42_range(ExponentInputs(3, 2, 0, 4, INF)).interval) == "[2, inf]"
    assert not prop42_range(ExponentInputs(3, 2, 1, 4, INF)).ok


def test_cor56_examples():
    r = cor56_pL(5, 1, -1, conjugate(F(10, 3)), "A-forward")
    assert r.case_tag == "A3" and r.values["p_L"] == F(6, 5)
    r = cor56_pL(5, 1, -1, F(10, 3), "B-forward")
    assert r.case_tag == "B-finite" and r.values["p_L"] == 6 == F(2 * 5 - 4, 5 - 4)
    r = cor56_pL(3, 1, -1, 7, "B-forward")
    assert r.case_tag == "B-infty" and r.interval.upper.value is INF and r.interval.upper.closed


def test_cor56_backward_directions():
    r = cor56_pL(3, 2, 0, 1, "B-backward")
    assert r.case_tag == "B-backward-pM" and r.values["p_L"] == p_M(3, 2, M_q(1, 3, 2, 1))
    r = cor56_pL(4, 1, 0, 2, "B-backward")
    assert r.case_tag == "B-backward-finite" and r.values["p_L"] == F(8, 6)
    r = cor56_pL(3, 2, 0, 4, "A-backward")
    assert r.case_tag == "A2-backward"
    r = cor56_pL(6, 1, 0, 3, "A-backward")
    assert r.case_tag == "A3-backward" and r.values["p_L"] == 4
    with pytest.raises(ParameterError):
        cor56_pL(3, 2, 0, 4, "sideways")


def test_one_sided_case_selection():
    # q' = 4 = 2n/(m(1-beta)) at n=4, m=2, beta=0
    q = F(4, 3)
    assert thm31_range(ExponentInputs(4, 2, 0, q, INF)).case_tag == "thm31-case1"
    assert thm31_range(ExponentInputs(4, 2, 0, q, INF), side=-1).case_tag == "thm31-case2"
    assert thm31_range(ExponentInputs(4, 2, 0, q, INF), side=+1).case_tag == "thm31-case1"
    # both branches give 1 there
    for side in (-1, 0, 1):
        assert thm31_range(ExponentInputs(4, 2, 0, q, INF), side=side).interval.lower.value == 1


# ---------------------------------------------------------------- presets


@pytest.mark.parametrize("tag", sorted(GOLDEN))
@pytest.mark.parametrize("n", range(1, 7))
def test_golden_table(tag, n):
    lo, lo_eps, hi, hi_closed, hi_eps = GOLDEN[tag][n]
    iv = preset(tag, n).interval
    assert iv.lower.value == lo and not iv.lower.closed and iv.lower.limit == lo_eps
    assert iv.upper.value == hi and iv.upper.closed == hi_closed and iv.upper.limit == hi_eps


def test_preset_lower_bound_at_least_pointwise():
    for n in range(1, 11):
        for tag in ("prop16", "prop17"):
            assert preset(tag, n).interval.lower.value >= F(n, n + 1)


@pytest.mark.parametrize("n", range(1, 11))
def test_cross_check_closed_forms(n):
    lo16 = preset("prop16", n).interval.lower.value
    lo17 = preset("prop17", n).interval.lower.value
    hi17 = preset("prop17", n).interval.upper
    if n <= 2:
        expected = F(n, n + 1)
    elif n == 3:
        expected = F(6, 7)
    else:
        expected = 2 - F(4, n)
    assert lo16 == expected and lo17 == expected
    if n >= 5:
        assert hi17.value == F(2 * n - 4, n - 4) and not hi17.closed and hi17.limit
    else:
        assert hi17.value is INF and hi17.closed


@pytest.mark.parametrize("n", range(3, 11))
def test_presets_reproduced_by_components(n):
    pm, pp = F(2 * n, n + 2), F(2 * n, n - 2)
    lo = thm31_range(ExponentInputs(n, 2, 0, pm, INF), side=-1).interval.lower.value
    assert preset("prop16", n).interval.lower.value == lo
    lo = cor56_pL(n, 1, -1, pm, "A-forward", side=-1).values["p_L"]
    hi = cor56_pL(n, 1, -1, pp, "B-forward", side=+1).values["p_L"]
    assert preset("prop17", n).interval.lower.value == lo
    assert preset("prop17", n).interval.upper.value == hi


def test_preset_with_supplied_exponents():
    r = preset("prop17", 5, p_minus=F(1), p_plus=INF)
    assert not r.interval.lower.limit and not r.interval.upper.limit
    assert r.interval.upper.value is INF
    with pytest.raises(ParameterError):
        preset("prop17", 5, p_minus=F(5, 2))
    with pytest.raises(ParameterError):
        preset("prop99", 3)


def test_golden_rows_shape():
    rows = golden_rows()
    assert len(rows) == 5 * 6
    assert {r["preset"] for r in rows} == {"prop14-heat", "prop14-sqrt", "prop15", "prop16", "prop17"}


def test_report_serializes_exactly():
    d = preset("prop17", 5).to_dict()
    assert d["interval"]["lower"] == {"value": "6/5", "closed": False, "limit": True}
    assert d["interval"]["upper"]["value"] == "6"
    assert d["interval"]["text"] == "(6/5-eps, 6+eps')"


# ---------------------------------------------------------------- invariants


@settings(max_examples=300)
@given(dims, homog, rationals, q_low)
def test_chain_away_from_q2(n, m, beta, q):
    chain = equivalence_chain(n, m, beta, q)
    if q != 2:
        assert len(set(chain)) == 1
    else:
        # at q = 2 the two exponents coincide whatever the parameters
        assert chain[0]
        assert chain[1] == chain[2] == chain[3]


@given(dims, homog, rationals, q_low, q_low)
def test_monotone_in_q(n, m, beta, q1, q2):
    q1, q2 = min(q1, q2), max(q1, q2)
    assert p_c(n, m, beta, q1) <= p_c(n, m, beta, q2)
    assert tilde_p_c(n, m, beta, q1) <= tilde_p_c(n, m, beta, q2)


@given(dims, homog, rationals, q_low)
def test_dual_consistency(n, m, beta, q):
    assert p_c_dual(n, m, beta, conjugate(q)) == p_c(n, m, beta, q)


@given(dims, homog, rationals, q_low, st.fractions(min_value=F(1, 10), max_value=20, max_denominator=10))
def test_thm31_interval_nonempty(n, m, beta, q, M):
    rep = thm31_range(ExponentInputs(n, m, beta, q, M))
    if M > F(n) / (2 * m):
        assert rep.ok and not rep.interval.is_empty
        assert rep.interval.contains(2)
    else:
        assert not rep.ok


@given(dims, homog, rationals)
def test_case_continuity(n, m, beta):
    qb = boundary_q(n, m, beta)
    if qb is None:
        return
    a = thm31_range(ExponentInputs(n, m, beta, qb, INF), side=-1)
    b = thm31_range(ExponentInputs(n, m, beta, qb, INF), side=+1)
    assert {a.case_tag, b.case_tag} == {"thm31-case1", "thm31-case2"}
    assert a.interval.lower.value == b.interval.lower.value == 1


def test_invariant_sweep():
    res = invariant_sweep()
    assert res.points == 10 ** 4
    for name in ("chain_off_q2", "monotone", "continuity", "dual"):
        assert res.violations[name] == 0
    # the literal chain breaks only at q = 2
    assert res.violations["chain"] > 0
    assert all(w[3] == 2 for w in res.witnesses["chain"])


def test_interval_contains():
    iv = Interval(*preset("prop17", 5).interval.__dict__.values())
    assert iv.contains(F(3, 2)) and not iv.contains(F(6, 5)) and not iv.contains(6)

from dataclass.rule import Clause, DnfRule, Literal
from dnf.equivalence import logically_equivalent, truth_table
from dnf.evaluate import (eval_boolean, eval_boolean_rows, eval_soft, mentioned_variables, rule_size, rule_to_gates,
                          score_rows, to_literals)
from dnf.rule_text import parse_rule, print_rule
from episodes.generator import sample_rows, sample_rule
from hypothesis import given, settings, strategies as st
from util.exceptions import (ComplementaryLiteralError, DimensionMismatchError, DomainError, RuleParseError,
                             VariableOutOfRangeError)
from util.rng import stream
import numpy as np
import pytest


@st.composite
def clauses(draw, n: int):
    variables = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(n, 4), unique=True))
    return Clause.of(Literal(v, draw(st.booleans())) for v in variables)


@st.composite
def rules(draw, max_n: int = 8):
    n = draw(st.integers(1, max_n))
    return DnfRule(frozenset(draw(st.lists(clauses(n), min_size=0, max_size=4))), n)


@st.composite
def rules_with_assignment(draw, max_n: int = 10):
    rule = draw(rules(max_n))
    assignment = draw(st.lists(st.booleans(), min_size=rule.num_variables, max_size=rule.num_variables))
    return rule, np.array(assignment, dtype=bool)


def test_empty_rule_is_false():
    assert not eval_boolean(DnfRule(frozenset(), 3), [1, 0, 1])


def test_empty_clause_is_true():
    rule = DnfRule(frozenset([Clause(frozenset())]), 2)
    assert eval_boolean(rule, [0, 0])


def test_and_not_clause():
    rule = DnfRule.from_lists([[(1, True), (2, False)]])
    assert eval_boolean(rule, [1, 0])
    assert not eval_boolean(rule, [1, 1])


def test_variable_out_of_range():
    rule = DnfRule.from_lists([[(3, True)]])
    with pytest.raises(VariableOutOfRangeError):
        eval_boolean(rule, [1, 0])


def test_complementary_clause_rejected():
    with pytest.raises(ComplementaryLiteralError):
        Clause.of([Literal(1, True), Literal(1, False)])


def test_interleaved_literal_columns():
    assert Literal(1, True).column == 0
    assert Literal(1, False).column == 1
    assert Literal(3, False).index == 6
    assert Literal.from_column(5) == Literal(3, False)
    lits = to_literals(np.array([[1.0, np.nan]]))
    np.testing.assert_array_equal(lits, [[1.0, 0.0, 0.5, 0.5]])


def test_rows_match_enumeration_oracle():
    rng = np.random.default_rng(5)
    table = truth_table(8)
    for _ in range(100):
        clauses_ = []
        for _ in range(rng.integers(1, 4)):
            variables = rng.choice(8, size=rng.integers(1, 4), replace=False) + 1
            clauses_.append([(int(v), bool(rng.random() < 0.5)) for v in variables])
        rule = DnfRule.from_lists(clauses_, 8)
        oracle = sum(
            any(all(row[v - 1] == p for v, p in clause) for clause in clauses_)
            for row in table
        )
        assert eval_boolean_rows(rule, table).sum() == oracle


def test_soft_empty_gates():
    z = np.zeros((3, 4))
    C, y_hat = eval_soft(z, np.zeros(3), np.array([0.2, 0.8, 0.4, 0.6]))
    np.testing.assert_array_equal(C, np.ones(3))
    assert y_hat == 0.0


def test_soft_single_literal_identity():
    z = np.zeros((1, 4))
    z[0, 2] = 1.0
    _, y_hat = eval_soft(z, np.ones(1), np.array([0.1, 0.9, 0.37, 0.63]))
    assert y_hat == pytest.approx(0.37)


def test_soft_rejects_bad_inputs():
    with pytest.raises(DimensionMismatchError):
        eval_soft(np.zeros((2, 4)), np.zeros(3), np.zeros(4))
    with pytest.raises(DomainError):
        eval_soft(np.full((1, 2), 1.5), np.ones(1), np.zeros(2))


@settings(max_examples=300, deadline=None)
@given(rules_with_assignment())
def test_hard_gates_reproduce_boolean(case):
    rule, assignment = case
    z, w = rule_to_gates(rule, 2 * rule.num_variables, slots=max(len(rule), 1))
    _, y_hat = eval_soft(z, w, to_literals(assignment.astype(np.float64)))
    assert y_hat in (0.0, 1.0)
    assert bool(y_hat) == eval_boolean(rule, assignment)


def test_hard_gates_match_boolean_on_ten_thousand_pairs():
    rng = stream(31)
    pairs = 0
    for _ in range(1000):
        n = int(rng.integers(2, 11))
        rule = sample_rule(rng, n, 4, min(4, n))
        X, truth = sample_rows(rng, rule, n, 10)
        z, w = rule_to_gates(rule, 2 * n)
        _, y_hat = eval_soft(z, w, to_literals(X))
        np.testing.assert_array_equal(y_hat, truth.astype(np.float64))
        pairs += X.shape[0]
    assert pairs == 10_000


@settings(max_examples=100, deadline=None)
@given(rules(), st.integers(0, 3), st.floats(0.0, 1.0))
def test_soft_monotone_in_clause_gate(rule, slot, bump):
    rng = np.random.default_rng(len(rule))
    n = rule.num_variables
    z = rng.random((4, 2 * n))
    w = rng.random(4)
    lits = rng.random(2 * n)
    _, before = eval_soft(z, w, lits)
    w[slot] = max(w[slot], bump)
    _, after = eval_soft(z, w, lits)
    assert after >= before - 1e-12


def test_equivalence_examples():
    assert logically_equivalent(parse_rule('(x1) OR (x2)'), parse_rule('(x2) OR (x1)'))
    contradiction = parse_rule('(x1 AND NOT x1)', allow_complementary=True)
    assert logically_equivalent(contradiction, DnfRule())
    assert logically_equivalent(parse_rule('(x1)'), parse_rule('(x1 AND x2) OR (x1 AND NOT x2)'))
    assert not logically_equivalent(parse_rule('(x1)'), parse_rule('(x2)'))


@settings(max_examples=100, deadline=None)
@given(rules(), rules())
def test_equivalence_reflexive_and_symmetric(a, b):
    assert logically_equivalent(a, a)
    assert bool(logically_equivalent(a, b)) == bool(logically_equivalent(b, a))


def test_wide_rules_use_sampling():
    a = DnfRule.from_lists([[(v, True)] for v in range(1, 23)])
    result = logically_equivalent(a, a)
    assert result.equivalent and result.sampled


def test_round_trip_text():
    text = '(x3) OR (x1 AND NOT x2)'
    assert print_rule(parse_rule(text)) == text
    assert print_rule(parse_rule('(x1 AND NOT x2) OR (x3)')) == text


def test_duplicate_clause_collapses():
    assert print_rule(parse_rule('(x1 AND x2) OR (x2 AND x1)')) == '(x1 AND x2)'


def test_named_printing():
    rule = parse_rule('(plas_gt_median AND age_gt_median)', names=['preg_gt_median', 'plas_gt_median', 'age_gt_median'])
    assert rule.variables == {2, 3}
    assert print_rule(rule, ['preg_gt_median', 'plas_gt_median', 'age_gt_median']) == '(plas_gt_median AND age_gt_median)'


def test_empty_rule_prints_false():
    assert print_rule(DnfRule()) == 'FALSE'
    assert parse_rule('FALSE').is_empty


@pytest.mark.parametrize('text', ['(x1 AND)', 'x1', '(x1) OR', '(foo)', '(x1 AND NOT x1)'])
def test_parse_errors(text):
    with pytest.raises(RuleParseError):
        parse_rule(text)


@settings(max_examples=200, deadline=None)
@given(rules())
def test_print_parse_round_trip(rule):
    parsed = parse_rule(print_rule(rule))
    assert parsed.clauses == rule.clauses


def test_size_and_variables():
    rule = parse_rule('(x1 AND NOT x4) OR (x2)')
    assert rule_size(rule) == (2, 3)
    assert mentioned_variables(rule) == {1, 2, 4}


def test_score_rows_unknown_is_half():
    rule = parse_rule('(x1)')
    soft, hard = score_rows(rule, np.array([[1.0], [0.0], [np.nan]]))
    np.testing.assert_allclose(soft, [1.0, 0.0, 0.5])
    np.testing.assert_array_equal(hard, [True, False, False])

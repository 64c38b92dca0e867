import json

import pytest

from largequot.errors import CapExceeded
from largequot.periodic import (
    ASSUMPTION_MARGIN,
    ASSUMPTION_SURJECTION,
    TRACE_SCHEMA,
    ConstructionState,
    check_pigraded_properties,
    format_factors,
    format_order,
    next_step,
    parse_order,
    replay_matches,
    run_construction,
    trace_to_jsonl,
)
from largequot.verbal import PrimeSeq, build_series
from largequot.words import parse_word


def test_format_order_shapes():
    assert format_order(1) == {"factored": "1", "decimal": 1}
    assert format_order(972) == {"factored": "2^2 * 3^5", "decimal": 972}
    assert format_order(30) == {"factored": "2 * 3 * 5", "decimal": 30}
    big = format_order(2**64)
    assert big == {"factored": "2^64"}
    assert "decimal" in format_order(2**64 - 1)
    with pytest.raises(ValueError):
        format_order(0)


def test_parse_order_inverts_format():
    for n in (1, 2, 12, 972, 2**63, 2**64, 3**100, 972 * 5**20):
        assert parse_order(format_order(n)) == n


def test_format_factors_matches_format_order():
    for n, factors in [
        (972, {2: 2, 3: 5}),
        (1, {}),
        (2**63, {2: 63}),
        (2**64, {2: 64}),
        (3**40, {3: 40}),
        (3**41, {3: 41}),
    ]:
        assert format_factors(factors) == format_order(n)
    # no-factorint path must survive orders far past any decimal budget
    tower = format_factors({5: 973, 2: 2, 3: 5})
    assert "decimal" not in tower
    assert parse_order(tower) == 972 * 5**973


def test_single_step_frozen_values():
    trace = run_construction([2, 3, 5, 7], 1)
    assert trace["schema"] == TRACE_SCHEMA
    assert trace["steps_completed"] == 1
    assert not trace["halted"]
    step = trace["steps"][0]
    assert step["word"] == "a"
    assert step["prefix_exponent"] == 1
    assert step["escape_depth"] == 1
    assert step["levi_depth"] == 1
    assert step["new_depth"] == 2
    assert step["order_at_level"] == 6
    assert step["relator"] == {"base": "a", "exponent": 6}
    assert step["relator_in_level"]
    assert [parse_order(o) for o in step["level_orders"]] == [4, 972]
    assert parse_order(step["growth"]["to"]) == 972
    assert len(step["assumptions_added"]) == 2
    tags = "".join(step["assumptions_added"])
    assert ASSUMPTION_SURJECTION in tags and ASSUMPTION_MARGIN in tags


def test_state_documents_along_the_trace():
    trace = run_construction([2, 3, 5, 7], 1)
    first, last = trace["states"]
    assert first["step"] == 0
    assert first["depth"] == 0
    assert first["relators"] == []
    assert [parse_order(o) for o in first["order_history"]] == [1]
    assert last["step"] == 1
    assert last["depth"] == 2
    assert last["relators"] == [{"base": "a", "exponent": 6}]
    assert [parse_order(o) for o in last["order_history"]] == [1, 972]
    assert len(last["assumptions"]) == 2


def test_second_step_halts_at_materialization_cap():
    trace = run_construction([2, 3, 5, 7], 2)
    assert trace["halted"]
    assert trace["steps_completed"] == 1
    assert "verbal materialization" in trace["halt_reason"]
    assert "about 10^683" in trace["halt_reason"]
    # the partial trace still carries the completed step
    assert trace["steps"][0]["relator"] == {"base": "a", "exponent": 6}
    assert len(trace["states"]) == 2


def test_halts_when_prime_sequence_runs_out():
    trace = run_construction([2], 1)
    assert trace["halted"]
    assert trace["steps_completed"] == 0
    assert "prime sequence" in trace["halt_reason"]


def test_replay_matches_serialized_traces():
    one = run_construction([2, 3, 5, 7], 1)
    assert replay_matches(one)
    halted = run_construction([2, 3, 5, 7], 2)
    assert replay_matches(halted)
    # a doctored order must be caught
    doctored = json.loads(json.dumps(one))
    doctored["states"][1]["order_history"][1]["decimal"] = 973
    assert not replay_matches(doctored)


def test_trace_runs_are_deterministic():
    a = run_construction([2, 3, 5, 7], 2)
    b = run_construction([2, 3, 5, 7], 2)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_jsonl_emits_one_line_per_state():
    trace = run_construction([2, 3, 5, 7], 1)
    lines = trace_to_jsonl(trace).splitlines()
    assert len(lines) == len(trace["states"]) == 2
    docs = [json.loads(line) for line in lines]
    assert docs == trace["states"]


def test_next_step_input_validation():
    state = ConstructionState(rank=2, pi=PrimeSeq([2, 3]))
    with pytest.raises(ValueError):
        next_step(state, parse_word("1", 2))
    with pytest.raises(ValueError):
        next_step(state, parse_word("a", 3))
    deep = ConstructionState(rank=2, pi=PrimeSeq([2, 3]), depth=2)
    with pytest.raises(ValueError):
        next_step(deep, parse_word("b", 2))  # primes too short to scan on
    with pytest.raises(CapExceeded):
        next_step(state, parse_word("a", 2), depth_cap=0)


def test_run_construction_validates_steps():
    with pytest.raises(ValueError):
        run_construction([2, 3], 0)
    with pytest.raises(ValueError):
        run_construction([2, 3], "two")


def test_graded_order_report():
    level = build_series([2, 3], 2, 2)[1]
    report = check_pigraded_properties(level, sample_count=200, seed=11)
    assert report["checked"] == 200
    assert report["violations"] == []
    assert set(report["order_histogram"]) <= {"1", "2", "3", "6"}
    assert sum(report["order_histogram"].values()) == 200
    assert report["solvable"]
    assert report["derived_length_bound"] == 2


def test_graded_order_report_explicit_words():
    level = build_series([2, 3], 2, 2)[1]
    a = parse_word("a", 2)
    report = check_pigraded_properties(level, words=[a, a**2, a**6])
    assert report["checked"] == 3
    assert report["order_histogram"] == {"1": 1, "3": 1, "6": 1}
    assert report["violations"] == []


def test_graded_order_needs_distinct_primes():
    level = build_series([2, 2], 2, 2)[1]
    with pytest.raises(ValueError):
        check_pigraded_properties(level, sample_count=5)

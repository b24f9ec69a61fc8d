"""Data model, text format, products, trimming and reindexing."""

from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suploc.automata import (
    Automaton,
    EventTable,
    FormatError,
    apply_state_order,
    language_upto,
    parse_automaton,
    project_state_names,
    reachable_trim,
    sync_product,
    write_automaton,
)
from suploc.rng import SplitMix64

from .instances import isomorphic, random_plant, random_table

MINIMAL = """
[EVENTS]
[STATES]
only initial marked
[TRANS]
"""


def table_abc(agents=(1, 1, 1)):
    return EventTable(("a", "b", "c")[: len(agents)], (True,) * len(agents), agents)


def test_parse_minimal_file():
    aut = parse_automaton(MINIMAL)
    assert aut.n_states == 1
    assert aut.initial == 0
    assert aut.marked == {0}
    assert aut.n_transitions == 0


def test_roundtrip_corpus_automaton(corpus_sup):
    again = parse_automaton(write_automaton(corpus_sup))
    assert again == corpus_sup


def test_write_is_fixed_point(corpus_sup, corpus_plant):
    for aut in (corpus_sup, corpus_plant):
        once = write_automaton(aut)
        assert write_automaton(parse_automaton(once)) == once


def test_one_state_automaton_canonical_text():
    aut = parse_automaton(MINIMAL)
    assert write_automaton(aut) == "[EVENTS]\n[STATES]\nonly initial marked\n[TRANS]\n"


def test_undeclared_event_names_line():
    text = MINIMAL + "only z only\n"
    with pytest.raises(FormatError) as err:
        parse_automaton(text)
    assert "'z'" in str(err.value)
    assert err.value.line == 6


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda t: t.replace("x1\n", "x1\nx1\n"), "duplicate state"),
        (lambda t: t.replace("a c 1", "a c 1\na c 1"), "duplicate event"),
        (lambda t: t.replace("x4 e x0", "x4 e x0\nx4 e x1"), "duplicate transition"),
        (lambda t: t.replace("x0 initial", "x0 initial\nxx initial"), "second 'initial'"),
        (lambda t: t.replace("x0 initial", "x0"), "no state carries 'initial'"),
        (lambda t: t.replace("a c 1", "a x 1"), "controllability flag"),
    ],
)
def test_parse_errors(corpus_sup, mangle, message):
    text = mangle(write_automaton(corpus_sup))
    with pytest.raises(FormatError) as err:
        parse_automaton(text)
    assert message in str(err.value)


def test_nondeterministic_construction_rejected():
    table = table_abc((1,))
    with pytest.raises(ValueError, match="nondeterministic"):
        Automaton(["p", "q"], table, [(0, 0, 0), (0, 0, 1)], 0)


def test_event_table_validation():
    with pytest.raises(ValueError, match="duplicate event"):
        EventTable(("a", "a"), (True, True), (1, 1))
    with pytest.raises(ValueError, match="contiguous"):
        EventTable(("a", "b"), (True, True), (1, 3))
    with pytest.raises(ValueError, match="start at 1"):
        EventTable(("a",), (True,), (0,))


def test_sync_product_neutral_element(corpus_sup):
    table = corpus_sup.alphabet
    loops = [(0, e, 0) for e in range(table.n_events)]
    unit = Automaton(["u"], table, loops, 0, [0])
    prod = sync_product([corpus_sup, unit])
    assert isomorphic(prod, reachable_trim(corpus_sup))


def test_sync_product_idempotent(corpus_sup):
    prod = sync_product([corpus_sup, corpus_sup])
    assert isomorphic(prod, reachable_trim(corpus_sup))


def test_sync_product_disjoint_enabling_blocks_shared_event():
    # Hand enumeration: a is enabled at A:s1 and at B:t0 only, and the only
    # joint move b takes A to s1 and B to t1, so a can never fire. The
    # reachable product is exactly {(s0,t0), (s1,t1)}.
    table = table_abc((1, 1))
    a = Automaton(["s0", "s1"], table, [(0, 1, 1), (1, 0, 1)], 0)
    b = Automaton(["t0", "t1"], table, [(0, 0, 0), (0, 1, 1)], 0)
    prod = sync_product([a, b])
    assert sorted(prod.states) == ["s0|t0", "s1|t1"]
    fired = {ev for _, ev, _ in prod.iter_transitions()}
    assert table.index("a") not in fired


def test_sync_product_alphabet_mismatch():
    t1 = table_abc((1,))
    t2 = EventTable(("a",), (False,), (1,))
    a = Automaton(["p"], t1, [], 0)
    b = Automaton(["p"], t2, [], 0)
    with pytest.raises(ValueError, match="alphabet mismatch"):
        sync_product([a, b])


def test_product_language_is_intersection():
    # Every trace of the product is a trace of both components and the other
    # way round, checked by exhaustive enumeration on small random automata.
    rng = SplitMix64(11)
    for _ in range(25):
        table = random_table(rng)
        a = random_plant(rng, table, max_states=8)
        b = random_plant(rng, table, max_states=8)
        prod = sync_product([a, b])
        depth = 6
        assert language_upto(prod, depth) == language_upto(a, depth) & language_upto(b, depth)


def test_reachable_trim_identity_when_reachable(corpus_sup):
    assert reachable_trim(corpus_sup) == corpus_sup


def test_reachable_trim_removes_unreachable():
    table = table_abc((1,))
    aut = Automaton(["p", "dead", "q"], table, [(0, 0, 2), (1, 0, 0)], 0, [1, 2])
    trimmed = reachable_trim(aut)
    assert trimmed.states == ("p", "q")
    assert trimmed.marked == {1}
    assert trimmed.n_transitions == 1


def test_reachable_trim_matches_bfs_oracle(cmt_plants):
    plant = cmt_plants["base"]

    # independent breadth-first count over the raw transition relation
    seen = {plant.initial}
    queue = deque([plant.initial])
    while queue:
        x = queue.popleft()
        for _, y in plant.out(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    assert reachable_trim(plant).n_states == len(seen)


def test_cmt_plant_roundtrip_state_count(cmt_plants):
    plant = cmt_plants["base"]
    again = parse_automaton(write_automaton(plant))
    assert again.n_states == plant.n_states
    assert again == plant


def test_apply_state_order_identity(corpus_sup):
    assert apply_state_order(corpus_sup, range(corpus_sup.n_states)) == corpus_sup


def test_apply_state_order_inverse(corpus_sup):
    order = [2, 0, 4, 1, 3]
    pos = [0] * len(order)
    for new, old in enumerate(order):
        pos[old] = new
    once = apply_state_order(corpus_sup, order)
    assert apply_state_order(once, pos) == corpus_sup


def test_apply_state_order_preserves_language(corpus_sup):
    rng = SplitMix64(5)
    for _ in range(10):
        order = rng.permutation(corpus_sup.n_states)
        shuffled = apply_state_order(corpus_sup, order)
        assert language_upto(shuffled, 7) == language_upto(corpus_sup, 7)
        assert isomorphic(shuffled, corpus_sup)


def test_apply_state_order_rejects_bad_permutation(corpus_sup):
    with pytest.raises(ValueError):
        apply_state_order(corpus_sup, [0, 1, 2])
    with pytest.raises(ValueError):
        apply_state_order(corpus_sup, [0, 0, 1, 2, 3])


def test_project_state_names():
    table = table_abc((1,))
    aut = Automaton(["p|ok", "q|ok"], table, [(0, 0, 1)], 0, [1])
    renamed = project_state_names(aut, 1)
    assert renamed.states == ("p", "q")
    collide = Automaton(["p|a", "p|b"], table, [(0, 0, 1)], 0)
    with pytest.raises(ValueError, match="injective"):
        project_state_names(collide, 1)


@st.composite
def automata(draw):
    n_ev = draw(st.integers(1, 4))
    n_ag = draw(st.integers(1, n_ev))
    agents = [1 + i % n_ag for i in range(n_ev)]
    table = EventTable(
        tuple(f"e{i}" for i in range(n_ev)),
        tuple(draw(st.booleans()) for _ in range(n_ev)),
        tuple(agents),
    )
    n = draw(st.integers(1, 6))
    triples = []
    for x in range(n):
        for e in range(n_ev):
            if draw(st.booleans()):
                triples.append((x, e, draw(st.integers(0, n - 1))))
    marked = [x for x in range(n) if draw(st.booleans())]
    return Automaton([f"s{x}" for x in range(n)], table, triples, 0, marked)


@settings(max_examples=60, deadline=None)
@given(automata())
def test_roundtrip_random_automata(aut):
    assert parse_automaton(write_automaton(aut)) == aut

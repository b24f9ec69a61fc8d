"""Control equivalence: closed-loop comparison and counterexamples."""

from suploc.automata import (
    Automaton,
    language_upto,
    marked_language_upto,
    reachable_trim,
    sync_product,
)
from suploc.context import build_context
from suploc.equivalence import (
    check_control_equivalence,
    controlled_behavior,
    replay_counterexample,
)
from suploc.localization import LocalSupervisor, build_local_supervisor, localize
from suploc.rng import SplitMix64

from .instances import isomorphic, systems_corpus


def as_loc(aut, agent=1):
    return LocalSupervisor(aut, None, agent)


def test_controlled_behavior_empty_supervisor_list(corpus_plant):
    assert controlled_behavior(corpus_plant, []) == reachable_trim(corpus_plant)


def test_controlled_behavior_with_monolithic_as_local(corpus_plant, corpus_sup):
    prod = controlled_behavior(corpus_plant, [as_loc(corpus_sup)])
    assert isomorphic(prod, sync_product([corpus_sup, corpus_plant]))


def test_corpus_local_supervisor_equivalent(corpus_plant, corpus_sup, corpus_ctx):
    cover = localize(corpus_sup, corpus_ctx, 1)
    loc = build_local_supervisor(corpus_sup, cover, 1)
    closed = controlled_behavior(corpus_plant, [loc])
    reference = sync_product([corpus_sup, corpus_plant])
    depth = 8
    assert language_upto(closed, depth) == language_upto(reference, depth)
    verdict = check_control_equivalence(corpus_plant, corpus_sup, [loc])
    assert verdict


def test_plant_equals_supervisor_no_locals(corpus_plant):
    assert check_control_equivalence(corpus_plant, corpus_plant, [])


def test_permissive_mutant_detected(corpus_plant, corpus_sup, corpus_ctx):
    # replace the only local supervisor with one that enables everything on a
    # system where the supervisor withholds c at x0: the joint loop then
    # admits a trace ending in a wrongly enabled event
    table = corpus_plant.alphabet
    allow_all = Automaton(
        ["top"], table, [(0, e, 0) for e in range(table.n_events)], 0, [0]
    )
    verdict = check_control_equivalence(corpus_plant, corpus_sup, [as_loc(allow_all)])
    assert not verdict
    assert verdict.failed == "language"
    assert "admit behavior" in verdict.direction
    assert verdict.counterexample[-1] in ("a", "c")  # first extra enabled event
    assert replay_counterexample(corpus_plant, corpus_sup, [as_loc(allow_all)], verdict)
    # cross-check by exhaustive enumeration
    closed = controlled_behavior(corpus_plant, [as_loc(allow_all)])
    reference = sync_product([corpus_sup, corpus_plant])
    assert language_upto(closed, 6) != language_upto(reference, 6)
    assert verdict.counterexample in language_upto(closed, 6)
    assert verdict.counterexample not in language_upto(reference, 6)


def test_marking_discrepancy_detected():
    from suploc.automata import EventTable

    table = EventTable(("a",), (True,), (1,))
    plant = Automaton(["p", "q"], table, [(0, 0, 1)], 0, [1])
    sup = Automaton(["p", "q"], table, [(0, 0, 1)], 0, [])
    liberal = Automaton(["top"], table, [(0, 0, 0)], 0, [0])
    verdict = check_control_equivalence(plant, sup, [as_loc(liberal)])
    assert not verdict
    assert verdict.failed == "marked-language"
    assert replay_counterexample(plant, sup, [as_loc(liberal)], verdict)


def test_joint_bfs_agrees_with_trace_enumeration():
    # the breadth-first criterion equals language and marked-language
    # equality, cross-checked exhaustively on small systems
    rng = SplitMix64(3)
    checked = equal = 0
    for plant, sup, agents in systems_corpus(37, 60, max_states=8):
        ctx = build_context(plant, sup, agents)
        locs = [
            build_local_supervisor(sup, localize(sup, ctx, s.agent_index), s.agent_index)
            for s in agents
        ]
        if rng.chance(1, 3) and locs:
            # damage one local supervisor to exercise the negative path
            table = plant.alphabet
            allow_all = Automaton(
                ["top"], table, [(0, e, 0) for e in range(table.n_events)], 0, [0]
            )
            locs[rng.below(len(locs))] = as_loc(allow_all)
        verdict = check_control_equivalence(plant, sup, locs)
        closed = controlled_behavior(plant, locs)
        reference = sync_product([sup, plant])
        depth = 8
        lang_equal = (
            language_upto(closed, depth) == language_upto(reference, depth)
            and marked_language_upto(closed, depth) == marked_language_upto(reference, depth)
        )
        # depth 8 saturates these state counts, so the comparison is exact
        assert bool(verdict) == lang_equal
        if not verdict:
            assert replay_counterexample(plant, sup, locs, verdict)
        checked += 1
        equal += bool(verdict)
    assert checked == 60
    assert 0 < equal  # both outcomes exercised
    assert equal < checked

"""Verify that a set of local supervisors controls a plant exactly like the
monolithic supervisor: same closed-loop language and same marked language.

Both sides are deterministic by construction, so equality is decided by a
joint breadth-first traversal of the two closed-loop automata, comparing
enabled-event sets and marking at every jointly reached state pair. The
first mismatch yields a shortest counterexample trace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import Automaton, sync_product


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of a control-equivalence check.

    When not equivalent, ``counterexample`` is an event-name trace witnessing
    the discrepancy, ``failed`` names the violated property ("language" or
    "marked-language") and ``direction`` states which side admits the extra
    behavior.
    """

    equivalent: bool
    counterexample: tuple[str, ...] | None = None
    failed: str | None = None
    direction: str | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def controlled_behavior(plant: Automaton, locs) -> Automaton:
    """Reachable closed loop of the plant under all local supervisors.

    The product marking is the conjunction of component markings, so the
    same structure carries both the language and the marked language of the
    controlled system.
    """
    return sync_product([plant] + [loc.automaton for loc in locs])


def check_control_equivalence(plant: Automaton, sup: Automaton, locs) -> EquivalenceVerdict:
    """Compare plant-under-local-supervisors against plant-under-monolithic.

    Performs one joint breadth-first traversal of the two deterministic
    closed loops; they are equivalent iff at every jointly reached state pair
    the enabled-event sets coincide and the marked flags coincide.
    """
    loop_locs = controlled_behavior(plant, locs)
    loop_mono = sync_product([sup, plant])
    events = plant.alphabet.events

    start = (loop_locs.initial, loop_mono.initial)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = deque((start,))

    def trace_to(pair: tuple[int, int]) -> tuple[str, ...]:
        rev = []
        cursor = pair
        while parent[cursor] is not None:
            cursor, ev = parent[cursor]
            rev.append(events[ev])
        return tuple(reversed(rev))

    while queue:
        pair = queue.popleft()
        a, b = pair
        ea = loop_locs.enabled(a)
        eb = loop_mono.enabled(b)
        if ea != eb:
            extra_local = sorted(set(ea) - set(eb))
            extra_mono = sorted(set(eb) - set(ea))
            if extra_local:
                ev = extra_local[0]
                direction = "local supervisors admit behavior the monolithic supervisor forbids"
            else:
                ev = extra_mono[0]
                direction = "local supervisors forbid behavior the monolithic supervisor admits"
            return EquivalenceVerdict(
                equivalent=False,
                counterexample=trace_to(pair) + (events[ev],),
                failed="language",
                direction=direction,
            )
        ma = loop_locs.is_marked(a)
        mb = loop_mono.is_marked(b)
        if ma != mb:
            direction = (
                "local supervisors mark behavior the monolithic supervisor does not"
                if ma
                else "local supervisors do not mark behavior the monolithic supervisor does"
            )
            return EquivalenceVerdict(
                equivalent=False,
                counterexample=trace_to(pair),
                failed="marked-language",
                direction=direction,
            )
        for ev in ea:
            nxt = (loop_locs.step(a, ev), loop_mono.step(b, ev))
            if nxt not in parent:
                parent[nxt] = (pair, ev)
                queue.append(nxt)
    return EquivalenceVerdict(equivalent=True)


def replay_counterexample(plant: Automaton, sup: Automaton, locs, verdict: EquivalenceVerdict) -> bool:
    """Confirm that a negative verdict's trace exhibits a real discrepancy.

    Simulates the trace on both closed loops component by component. For a
    language discrepancy the final event must be executable on exactly one
    side; for a marking discrepancy the whole trace must run on both sides
    and end with differing conjunctive markings.
    """
    if verdict.equivalent or verdict.counterexample is None:
        return False
    side_locs = [plant] + [loc.automaton for loc in locs]
    side_mono = [sup, plant]

    def run(components, trace):
        cursor = [a.initial for a in components]
        for name in trace:
            ev = plant.alphabet.index(name)
            nxt = [a.step(c, ev) for a, c in zip(components, cursor)]
            if any(n is None for n in nxt):
                return None
            cursor = nxt
        return cursor

    if verdict.failed == "language":
        prefix = verdict.counterexample[:-1]
        if run(side_locs, prefix) is None or run(side_mono, prefix) is None:
            return False
        full_locs = run(side_locs, verdict.counterexample)
        full_mono = run(side_mono, verdict.counterexample)
        return (full_locs is None) != (full_mono is None)
    cur_locs = run(side_locs, verdict.counterexample)
    cur_mono = run(side_mono, verdict.counterexample)
    if cur_locs is None or cur_mono is None:
        return False
    marked_locs = all(a.is_marked(c) for a, c in zip(side_locs, cur_locs))
    marked_mono = all(a.is_marked(c) for a, c in zip(side_mono, cur_mono))
    return marked_locs != marked_mono

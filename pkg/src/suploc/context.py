"""Per-state control information for a (plant, supervisor) pair, and a
standard monolithic supervisor synthesis routine.

The context tables answer, for every supervisor state: which events the
supervisor enables, which locally controllable events each agent's supervisor
withholds even though the plant could execute them, whether the state is
marked, and whether any jointly reachable plant state is marked. The
localization algorithms query these tables heavily, so they are computed once
per (plant, supervisor) version and kept immutable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import Automaton, EventTable

#: Reserved state name marking a forbidden sink in requirement automata.
FORBIDDEN_STATE = "bad"


class SynthesisEmptyError(RuntimeError):
    """Synthesis removed every behavior; no supervisor exists."""


@dataclass(frozen=True)
class AgentSpec:
    """One agent's event alphabet and its locally controllable subset."""

    agent_index: int
    events: frozenset
    controllable: frozenset

    def __post_init__(self):
        if not self.controllable <= self.events:
            raise ValueError("controllable events must belong to the agent's alphabet")


def agents_from_table(table: EventTable) -> tuple[AgentSpec, ...]:
    """Derive the agent partition recorded in an event table."""
    return tuple(
        AgentSpec(
            agent_index=k,
            events=frozenset(table.agent_events(k)),
            controllable=frozenset(table.agent_controllable(k)),
        )
        for k in range(1, table.n_agents + 1)
    )


class ControlContext:
    """Immutable control-information tables for a supervisor against a plant.

    ``enabled[x]`` is the set of events the supervisor defines at state x.
    ``disabled[k][x]`` is the set of agent k's controllable events that the
    supervisor leaves undefined at x although the plant can execute them in
    some jointly reached configuration (existential over all reachable
    supervisor/plant state pairs). ``marked[x]`` is supervisor marking and
    ``plant_marked[x]`` records whether some jointly reachable plant partner
    of x is marked. Supervisor states never reached in the joint traversal
    keep their enabled sets, have empty disabled sets and plant_marked False.
    """

    __slots__ = ("n_states", "agents", "enabled", "enabled_sorted", "disabled", "marked", "plant_marked")

    def __init__(self, n_states, agents, enabled, enabled_sorted, disabled, marked, plant_marked):
        self.n_states = n_states
        self.agents = agents
        self.enabled = enabled
        self.enabled_sorted = enabled_sorted
        self.disabled = disabled
        self.marked = marked
        self.plant_marked = plant_marked


def build_context(plant: Automaton, sup: Automaton, agents) -> ControlContext:
    """Compute control-information tables by joint forward reachability.

    ``sup`` is assumed to be a sub-behavior of ``plant`` (every trace of the
    supervisor is executable in the plant); this is a documented assumption,
    not verified here.
    """
    if plant.alphabet != sup.alphabet:
        raise ValueError("plant and supervisor must share one event table")
    agents = tuple(agents)
    n = sup.n_states
    enabled = tuple(frozenset(sup.succ_maps[x]) for x in range(n))
    enabled_sorted = tuple(sup.enabled(x) for x in range(n))

    plant_can: list[set] = [set() for _ in range(n)]
    plant_marked = [False] * n
    seen = {(sup.initial, plant.initial)}
    queue = deque(seen)
    sup_succ = sup.succ_maps
    plant_succ = plant.succ_maps
    while queue:
        x, q = queue.popleft()
        row_q = plant_succ[q]
        plant_can[x].update(row_q)
        if q in plant.marked:
            plant_marked[x] = True
        for ev, y in sup_succ[x].items():
            p = row_q.get(ev)
            if p is None:
                continue
            pair = (y, p)
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)

    disabled = {}
    for spec in agents:
        ctrl = spec.controllable
        disabled[spec.agent_index] = tuple(
            frozenset((plant_can[x] - enabled[x]) & ctrl) for x in range(n)
        )
    return ControlContext(
        n_states=n,
        agents=agents,
        enabled=enabled,
        enabled_sorted=enabled_sorted,
        disabled=disabled,
        marked=tuple(x in sup.marked for x in range(n)),
        plant_marked=tuple(plant_marked),
    )


def synthesize_monolithic(plants, requirements=()) -> Automaton:
    """Supremal controllable and nonblocking supervisor for plants under
    requirement automata.

    All automata share one event table. Requirements may express state-based
    prohibitions through a dead sink state named ``bad`` (``FORBIDDEN_STATE``):
    any product state whose requirement component sits in such a state is
    removed. Language-based requirements must be complete with respect to
    uncontrollable events; a requirement that withholds an uncontrollable
    event the plants can execute renders the source state uncontrollable and
    it is removed.

    Returns a deterministic automaton whose states are the surviving product
    tuples, named by joining component state names with ``|``. Raises
    :class:`SynthesisEmptyError` when nothing survives.
    """
    plants = list(plants)
    requirements = list(requirements)
    if not plants:
        raise ValueError("at least one plant automaton is required")
    table = plants[0].alphabet
    comps = plants + requirements
    for a in comps[1:]:
        if a.alphabet != table:
            raise ValueError("alphabet mismatch between synthesis components")
    n_plants = len(plants)
    unc_events = tuple(e for e in range(table.n_events) if not table.controllable[e])

    init = tuple(a.initial for a in comps)
    index: dict[tuple[int, ...], int] = {init: 0}
    order: list[tuple[int, ...]] = [init]
    succ: list[dict[int, int]] = []
    plant_unc: list[tuple[int, ...]] = []
    forbidden: list[bool] = []
    all_marked: list[bool] = []
    queue = deque((init,))
    while queue:
        t = queue.popleft()
        row: dict[int, int] = {}
        for ev, d0 in comps[0].out(t[0]):
            dst = [d0]
            for a, c in zip(comps[1:], t[1:]):
                nxt = a.step(c, ev)
                if nxt is None:
                    break
                dst.append(nxt)
            else:
                tt = tuple(dst)
                tgt = index.get(tt)
                if tgt is None:
                    tgt = len(order)
                    index[tt] = tgt
                    order.append(tt)
                    queue.append(tt)
                row[ev] = tgt
        succ.append(row)
        plant_unc.append(
            tuple(
                e
                for e in unc_events
                if all(comps[i].step(t[i], e) is not None for i in range(n_plants))
            )
        )
        forbidden.append(
            any(comps[i].states[t[i]] == FORBIDDEN_STATE for i in range(n_plants, len(comps)))
        )
        all_marked.append(all(c in a.marked for a, c in zip(comps, t)))

    preds: list[list[int]] = [[] for _ in order]
    for src, row in enumerate(succ):
        for tgt in row.values():
            preds[tgt].append(src)

    good = {i for i in range(len(order)) if not forbidden[i]}
    changed = True
    while changed:
        changed = False
        while True:
            viol = [
                x
                for x in good
                if any(succ[x].get(e, -1) not in good for e in plant_unc[x])
            ]
            if not viol:
                break
            good.difference_update(viol)
            changed = True
        co = {x for x in good if all_marked[x]}
        frontier = deque(co)
        while frontier:
            y = frontier.popleft()
            for x in preds[y]:
                if x in good and x not in co:
                    co.add(x)
                    frontier.append(x)
        if co != good:
            good = co
            changed = True

    if 0 not in good:
        raise SynthesisEmptyError("synthesis removed all behavior; no supervisor exists")

    reach = {0}
    frontier = deque((0,))
    while frontier:
        x = frontier.popleft()
        for tgt in succ[x].values():
            if tgt in good and tgt not in reach:
                reach.add(tgt)
                frontier.append(tgt)
    keep = [i for i in range(len(order)) if i in reach]
    remap = {old: new for new, old in enumerate(keep)}
    triples = [
        (remap[src], ev, remap[tgt])
        for src in keep
        for ev, tgt in succ[src].items()
        if tgt in reach
    ]
    names = [
        "|".join(a.states[c] for a, c in zip(comps, order[i]))
        for i in keep
    ]
    marked = [remap[i] for i in keep if all_marked[i]]
    return Automaton(names, table, triples, remap[0], marked)

"""Carrying congruences across model edits: conflict isolation and the full
transformational localization pipeline.

State identity across model versions is by state name; indices are
per-automaton and may be permuted freely. A base congruence is first carried
over (removed states drop out of their cells, new states become singleton
cells), then states that conflict with a cellmate under the variant system
are isolated into fresh singleton cells until the partition is a control
congruence again, and finally the localization loop merges whatever the edit
still allows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import Automaton
from .context import ControlContext, build_context
from .localization import (
    Cover,
    LocalSupervisor,
    build_local_supervisor,
    control_consistent,
    localize,
)


@dataclass(frozen=True)
class StateCorrespondence:
    """Name-based state correspondence between a base and a variant automaton."""

    retained: frozenset
    removed: frozenset
    added: frozenset


def state_correspondence(base: Automaton, variant: Automaton) -> StateCorrespondence:
    base_names = set(base.states)
    variant_names = set(variant.states)
    return StateCorrespondence(
        retained=frozenset(base_names & variant_names),
        removed=frozenset(base_names - variant_names),
        added=frozenset(variant_names - base_names),
    )


def carry_over_cover(base_cover: Cover, base: Automaton, variant: Automaton) -> Cover:
    """Transplant a base-system cover onto the variant state set.

    States that disappeared are dropped from their cells (cells emptied this
    way vanish); states new to the variant become singleton cells.
    """
    if len(base_cover.cell_of) != base.n_states:
        raise ValueError("base cover size does not match the base supervisor")
    variant_index = {name: x for x, name in enumerate(variant.states)}
    cell_of: list[int | None] = [None] * variant.n_states
    ident = 0
    for cell in base_cover.cells():
        kept = [variant_index[base.states[x]] for x in cell if base.states[x] in variant_index]
        if kept:
            for v in kept:
                cell_of[v] = ident
            ident += 1
    for v in range(variant.n_states):
        if cell_of[v] is None:
            cell_of[v] = ident
            ident += 1
    return Cover(cell_of)


def isolate(
    base_cover: Cover,
    base: Automaton,
    variant: Automaton,
    ctx: ControlContext,
    agent: int,
    *,
    carried: Cover | None = None,
) -> Cover:
    """Restore congruence validity after a model edit by isolating conflicts.

    Starting from the carried-over cover, repeatedly scan the states shared
    with the base system in ascending variant index; a state that is not
    control consistent with some cellmate, or whose successor on an event
    both enable lands in a different cell than the cellmate's, is moved to a
    fresh singleton cell. A full clean scan terminates the loop. The result
    partitions the variant state set, is a control congruence for the variant
    system, and never merges cells: every output cell is contained in a
    carried-over cell. Pass ``carried`` to reuse a precomputed carry-over.
    """
    if carried is None:
        carried = carry_over_cover(base_cover, base, variant)
    cell_of = list(carried.cell_of)
    members: dict[int, list[int]] = {}
    for x, ident in enumerate(cell_of):
        members.setdefault(ident, []).append(x)
    next_id = max(cell_of) + 1 if cell_of else 0

    base_names = set(base.states)
    retained = [x for x in range(variant.n_states) if variant.states[x] in base_names]
    enabled = ctx.enabled
    succ = variant.succ_maps

    changed = True
    while changed:
        changed = False
        for x in retained:
            cell = members[cell_of[x]]
            if len(cell) == 1:
                continue
            sx = succ[x]
            ex = enabled[x]
            conflict = False
            for y in sorted(cell):
                if y == x:
                    continue
                if not control_consistent(ctx, agent, x, y):
                    conflict = True
                    break
                sy = succ[y]
                for ev in ex & enabled[y]:
                    if cell_of[sx[ev]] != cell_of[sy[ev]]:
                        conflict = True
                        break
                if conflict:
                    break
            if conflict:
                cell.remove(x)
                cell_of[x] = next_id
                members[next_id] = [x]
                next_id += 1
                changed = True
    return Cover(cell_of)


@dataclass(frozen=True)
class AgentMapping:
    """Maps each variant agent to a base agent, or to 0 for none."""

    base_agent_of: tuple[int, ...]

    @classmethod
    def identity(cls, n_variant: int, n_base: int | None = None) -> "AgentMapping":
        """Agent k maps to base agent k where that exists, otherwise to 0."""
        if n_base is None:
            n_base = n_variant
        return cls(tuple(k if k <= n_base else 0 for k in range(1, n_variant + 1)))

    def base_agent(self, variant_agent: int) -> int:
        if not 1 <= variant_agent <= len(self.base_agent_of):
            raise ValueError(f"variant agent {variant_agent} out of range")
        return self.base_agent_of[variant_agent - 1]

    def validate(self, n_base: int) -> None:
        for k, b in enumerate(self.base_agent_of, start=1):
            if not 0 <= b <= n_base:
                raise ValueError(f"mapping of agent {k} references unknown base agent {b}")


def tsl(
    base_covers,
    base_sup: Automaton,
    variant_plant: Automaton,
    variant_sup: Automaton,
    agents,
    mapping: AgentMapping,
) -> tuple[list[LocalSupervisor], list[Cover]]:
    """Transformational localization of the variant system.

    For each variant agent, the initial partition is either the isolated
    carry-over of the mapped base congruence or, when the mapping is 0, the
    singleton partition; the localization loop then merges cells, and the
    quotient automaton becomes the agent's local supervisor. Returns the
    local supervisors and the final covers (the covers seed the next round
    when the system is edited again).
    """
    base_covers = list(base_covers)
    agents = list(agents)
    mapping.validate(len(base_covers))
    if len(mapping.base_agent_of) != len(agents):
        raise ValueError("mapping length does not match the variant agent list")
    ctx = build_context(variant_plant, variant_sup, agents)
    supervisors: list[LocalSupervisor] = []
    covers: list[Cover] = []
    for spec in agents:
        k = spec.agent_index
        mapped = mapping.base_agent(k)
        if mapped != 0:
            init = isolate(base_covers[mapped - 1], base_sup, variant_sup, ctx, k)
        else:
            init = Cover.singleton(variant_sup.n_states)
        cover = localize(variant_sup, ctx, k, init)
        supervisors.append(build_local_supervisor(variant_sup, cover, k))
        covers.append(cover)
    return supervisors, covers

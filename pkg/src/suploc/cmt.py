"""Parametric cat-and-mouse-tower benchmark generator.

A tower has ``levels`` floors of five rooms each. Cats circulate one way
through the rooms of a floor, mice the other way, and a bidirectional
uncontrollable cat door links rooms 2 and 4; all other doors are
controllable. Consecutive floors are joined by a bidirectional controllable
connection for both animals whose room number steps with the floor number
(floor 1 connects through room 1, floor 2 through room 2, and so on,
wrapping after room 5), which forms a spiral staircase. Cats start in room 1 of the
bottom floor, mice in room 5 of the top floor, and the requirement is that a
cat and a mouse never occupy one room at the same time.

Each floor is an agent owning every event whose source room lies on that
floor, including the upward connection to the next floor but not the
downward one back.

Variant edits (each applied to the base system, not cumulatively):

* v1: the cat door from room 3 to room 4 on floor 2 is removed.
* v2: every door is controllable.
* v3: an added requirement forbids cats from entering the top floor.
* v4: room 5 of floor 1 is removed together with its doors.
* v5: floor 1 gains a room 6 with bidirectional controllable cat and mouse
  doors to room 5.

Marking: the initial configuration (every animal in its start room) is the
marked configuration. This convention reproduces the published size of the
four-floor supervisor; marking all configurations does not.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import Automaton, EventTable, project_state_names
from .context import agents_from_table, synthesize_monolithic

VARIANTS = ("base", "v1", "v2", "v3", "v4", "v5")

# Directed doors inside one floor, as (source room, destination room).
CAT_DOORS = ((1, 3), (3, 2), (2, 1), (3, 4), (4, 5), (5, 3))
CAT_DOORS_UNCONTROLLABLE = ((2, 4), (4, 2))
MOUSE_DOORS = ((3, 1), (1, 2), (2, 3), (3, 5), (5, 4), (4, 3))

CAT_START_ROOM = 1
MOUSE_START_ROOM = 5


@dataclass(frozen=True)
class CmtConfig:
    levels: int = 4
    animals: int = 1
    variant: str = "base"

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be at least 1")
        if self.animals < 1:
            raise ValueError("animals must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")


@dataclass(frozen=True)
class CmtSystem:
    plants: tuple[Automaton, ...]
    requirements: tuple[Automaton, ...]
    agents: tuple
    table: EventTable


def room_name(level: int, room: int) -> str:
    return f"L{level}R{room}"


def _rooms(cfg: CmtConfig) -> list[tuple[int, int]]:
    rooms = []
    for level in range(1, cfg.levels + 1):
        top = 5
        for room in range(1, top + 1):
            if cfg.variant == "v4" and (level, room) == (1, 5):
                continue
            rooms.append((level, room))
        if cfg.variant == "v5" and level == 1:
            rooms.append((1, 6))
    return rooms


def _doors(cfg: CmtConfig, kind: str) -> list[tuple[tuple[int, int], tuple[int, int], bool]]:
    """Directed doors for one animal kind: (src, dst, controllable)."""
    existing = set(_rooms(cfg))
    doors = []

    def add(src, dst, controllable):
        if src in existing and dst in existing:
            doors.append((src, dst, controllable))

    for level in range(1, cfg.levels + 1):
        if kind == "cat":
            for a, b in CAT_DOORS:
                if cfg.variant == "v1" and level == 2 and (a, b) == (3, 4):
                    continue
                add((level, a), (level, b), True)
            for a, b in CAT_DOORS_UNCONTROLLABLE:
                add((level, a), (level, b), cfg.variant == "v2")
        else:
            for a, b in MOUSE_DOORS:
                add((level, a), (level, b), True)
    for level in range(1, cfg.levels):
        j = (level - 1) % 5 + 1
        add((level, j), (level + 1, j), True)
        add((level + 1, j), (level, j), True)
    if cfg.variant == "v5":
        add((1, 5), (1, 6), True)
        add((1, 6), (1, 5), True)
    return doors


def _animal_tags(cfg: CmtConfig) -> list[tuple[str, str]]:
    """(tag, kind) per individual animal; cats first."""
    if cfg.animals == 1:
        return [("c", "cat"), ("m", "mouse")]
    tags = [(f"c{i}", "cat") for i in range(1, cfg.animals + 1)]
    tags += [(f"m{i}", "mouse") for i in range(1, cfg.animals + 1)]
    return tags


def gen_cmt(cfg: CmtConfig) -> CmtSystem:
    """Generate plants, requirements, agent partition and event table.

    One position automaton per animal (states are rooms, events are directed
    door traversals named ``<tag><src-level>_<src-room>__<dst-level>_<dst-room>``,
    each owned by the agent of its source level), plus one occupancy monitor
    per room whose dead ``bad`` state forbids cat and mouse meeting there,
    plus the extra top-floor monitor under v3.
    """
    tags = _animal_tags(cfg)
    doors_of_kind = {"cat": _doors(cfg, "cat"), "mouse": _doors(cfg, "mouse")}

    ev_names: list[str] = []
    ev_ctrl: list[bool] = []
    ev_agent: list[int] = []
    # (owner position in tags, kind, src, dst) per event
    ev_meta: list[tuple[int, str, tuple[int, int], tuple[int, int]]] = []
    for pos, (tag, kind) in enumerate(tags):
        for src, dst, controllable in doors_of_kind[kind]:
            ev_names.append(f"{tag}{src[0]}_{src[1]}__{dst[0]}_{dst[1]}")
            ev_ctrl.append(controllable)
            ev_agent.append(src[0])
            ev_meta.append((pos, kind, src, dst))
    table = EventTable(tuple(ev_names), tuple(ev_ctrl), tuple(ev_agent))

    rooms = _rooms(cfg)
    room_index = {r: i for i, r in enumerate(rooms)}
    start_of_kind = {
        "cat": (1, CAT_START_ROOM),
        "mouse": (cfg.levels, MOUSE_START_ROOM),
    }

    plants = []
    for pos, (tag, kind) in enumerate(tags):
        triples = []
        for ev, (owner, _, src, dst) in enumerate(ev_meta):
            if owner == pos:
                triples.append((room_index[src], ev, room_index[dst]))
            else:
                for x in range(len(rooms)):
                    triples.append((x, ev, x))
        start = room_index[start_of_kind[kind]]
        plants.append(
            Automaton([room_name(*r) for r in rooms], table, triples, start, [start])
        )

    requirements = [_room_monitor(cfg, room, ev_meta, table) for room in rooms]
    if cfg.variant == "v3":
        requirements.append(_top_floor_monitor(cfg, ev_meta, table))

    return CmtSystem(
        plants=tuple(plants),
        requirements=tuple(requirements),
        agents=agents_from_table(table),
        table=table,
    )


def _room_monitor(cfg, room, ev_meta, table) -> Automaton:
    """Occupancy monitor for one room: counts cats and mice present and falls
    into the dead ``bad`` state when both kinds would be inside at once."""
    k = cfg.animals
    states = [f"c{c}m{m}" for c, m in _occ_states(k)] + ["bad"]
    index = {name: i for i, name in enumerate(states)}

    def occ_name(cats, mice):
        return f"c{cats}m{mice}"

    if room == (1, CAT_START_ROOM):
        start = occ_name(k, 0)
    elif room == (cfg.levels, MOUSE_START_ROOM):
        start = occ_name(0, k)
    else:
        start = occ_name(0, 0)

    triples = []
    for ev, (_, kind, src, dst) in enumerate(ev_meta):
        entering = dst == room
        leaving = src == room
        for cats, mice in _occ_states(k):
            here = index[occ_name(cats, mice)]
            if entering:
                if kind == "cat":
                    if mice > 0:
                        triples.append((here, ev, index["bad"]))
                    elif cats < k:
                        triples.append((here, ev, index[occ_name(cats + 1, 0)]))
                else:
                    if cats > 0:
                        triples.append((here, ev, index["bad"]))
                    elif mice < k:
                        triples.append((here, ev, index[occ_name(0, mice + 1)]))
            elif leaving:
                if kind == "cat" and cats > 0:
                    triples.append((here, ev, index[occ_name(cats - 1, 0)]))
                elif kind == "mouse" and mice > 0:
                    triples.append((here, ev, index[occ_name(0, mice - 1)]))
            else:
                triples.append((here, ev, here))
    marked = [index[occ_name(c, m)] for c, m in _occ_states(k)]
    return Automaton(states, table, triples, index[start], marked)


def _occ_states(k: int):
    """Valid occupancy counts for one room: never both kinds at once."""
    yield (0, 0)
    for c in range(1, k + 1):
        yield (c, 0)
    for m in range(1, k + 1):
        yield (0, m)


def _top_floor_monitor(cfg, ev_meta, table) -> Automaton:
    """Monitor forbidding any cat move that enters the top floor."""
    top = cfg.levels
    states = ["ok", "bad"]
    triples = []
    for ev, (_, kind, src, dst) in enumerate(ev_meta):
        if kind == "cat" and dst[0] == top and src[0] != top:
            triples.append((0, ev, 1))
        else:
            triples.append((0, ev, 0))
    return Automaton(states, table, triples, 0, [0])


def synthesize_cmt(system: CmtSystem) -> Automaton:
    """Synthesize the monolithic supervisor and rename its states to the
    animal configuration (the monitor components add no information, so the
    projection is injective on reachable supervisor states). Configuration
    names are stable across variants, which is what lets covers carry over."""
    sup = synthesize_monolithic(system.plants, system.requirements)
    return project_state_names(sup, len(system.plants))

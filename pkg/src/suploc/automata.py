"""Finite automata over a shared event table: data model, text format, products.

All automata here are deterministic. States are named, and the position of a
state in the state list is its index; the localization algorithms order their
work by state index, so reindexing (``apply_state_order``) changes results
while preserving the language.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path


class FormatError(ValueError):
    """Malformed automaton or cover text. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _check_token(name: str, what: str) -> None:
    if not name:
        raise ValueError(f"{what} name must be non-empty")
    if any(c.isspace() for c in name) or "#" in name or name.startswith("["):
        raise ValueError(f"invalid {what} name {name!r}")


@dataclass(frozen=True)
class EventTable:
    """Shared alphabet: event names with controllability and owning agent.

    Every event is local to exactly one agent (agents are numbered from 1),
    so the per-agent event sets partition the alphabet.
    """

    events: tuple[str, ...]
    controllable: tuple[bool, ...]
    agent_of: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "controllable", tuple(bool(c) for c in self.controllable))
        object.__setattr__(self, "agent_of", tuple(int(a) for a in self.agent_of))
        if not (len(self.events) == len(self.controllable) == len(self.agent_of)):
            raise ValueError("events, controllable and agent_of must have equal lengths")
        index: dict[str, int] = {}
        for pos, name in enumerate(self.events):
            _check_token(name, "event")
            if name in index:
                raise ValueError(f"duplicate event name {name!r}")
            index[name] = pos
        owned: set[int] = set()
        for agent in self.agent_of:
            if agent < 1:
                raise ValueError("agent indices start at 1")
            owned.add(agent)
        if owned and owned != set(range(1, max(owned) + 1)):
            raise ValueError("agent indices must be contiguous from 1")
        object.__setattr__(self, "_index", index)

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def n_agents(self) -> int:
        return max(self.agent_of, default=0)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown event {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def agent_events(self, agent: int) -> tuple[int, ...]:
        return tuple(e for e in range(self.n_events) if self.agent_of[e] == agent)

    def agent_controllable(self, agent: int) -> tuple[int, ...]:
        return tuple(
            e
            for e in range(self.n_events)
            if self.agent_of[e] == agent and self.controllable[e]
        )


class Automaton:
    """Deterministic finite automaton over a shared :class:`EventTable`.

    ``transitions`` is a partial function (state index, event index) -> state
    index, supplied to the constructor as an iterable of (src, event, dst)
    index triples. Instances are immutable by convention; all operations in
    this package return new automata.
    """

    __slots__ = ("states", "alphabet", "initial", "marked", "succ_maps", "_out", "_name_index")

    def __init__(
        self,
        states: Iterable[str],
        alphabet: EventTable,
        transitions: Iterable[tuple[int, int, int]],
        initial: int,
        marked: Iterable[int] = (),
    ):
        states = tuple(states)
        if not states:
            raise ValueError("an automaton needs at least one state")
        name_index: dict[str, int] = {}
        for pos, name in enumerate(states):
            _check_token(name, "state")
            if name in name_index:
                raise ValueError(f"duplicate state name {name!r}")
            name_index[name] = pos
        n = len(states)
        if not 0 <= initial < n:
            raise ValueError("initial state index out of range")
        marked = frozenset(marked)
        if any(not 0 <= x < n for x in marked):
            raise ValueError("marked state index out of range")
        succ: list[dict[int, int]] = [dict() for _ in range(n)]
        n_ev = alphabet.n_events
        for src, ev, dst in transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError("transition endpoint out of range")
            if not 0 <= ev < n_ev:
                raise ValueError("transition event out of range")
            row = succ[src]
            if ev in row:
                raise ValueError(
                    f"nondeterministic duplicate transition from {states[src]!r} "
                    f"on {alphabet.events[ev]!r}"
                )
            row[ev] = dst
        self.states = states
        self.alphabet = alphabet
        self.initial = initial
        self.marked = marked
        self.succ_maps = tuple(succ)
        self._out = tuple(tuple(sorted(row.items())) for row in succ)
        self._name_index = name_index

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_transitions(self) -> int:
        return sum(len(row) for row in self.succ_maps)

    def step(self, state: int, event: int) -> int | None:
        return self.succ_maps[state].get(event)

    def enabled(self, state: int) -> tuple[int, ...]:
        """Events with a defined transition at ``state``, ascending."""
        return tuple(e for e, _ in self._out[state])

    def out(self, state: int) -> tuple[tuple[int, int], ...]:
        """(event, target) pairs at ``state``, ascending by event."""
        return self._out[state]

    def index_of(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise ValueError(f"unknown state {name!r}") from None

    def is_marked(self, state: int) -> bool:
        return state in self.marked

    def iter_transitions(self):
        """Yield (src, event, dst) ascending by (src, event)."""
        for src, row in enumerate(self._out):
            for ev, dst in row:
                yield src, ev, dst

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automaton):
            return NotImplemented
        return (
            self.states == other.states
            and self.alphabet == other.alphabet
            and self.initial == other.initial
            and self.marked == other.marked
            and self.succ_maps == other.succ_maps
        )

    def __repr__(self) -> str:
        return (
            f"<Automaton {self.n_states} states, {self.n_transitions} transitions, "
            f"{self.alphabet.n_events} events>"
        )


# ---------------------------------------------------------------------------
# Text format


def parse_automaton(text: str) -> Automaton:
    """Parse the line-based automaton format.

    Three sections in fixed order. ``#`` starts a comment, blank lines are
    ignored, tokens are whitespace-separated::

        [EVENTS]
        <name> <c|u> <agent:int>
        [STATES]
        <name> [initial] [marked]
        [TRANS]
        <src-state> <event> <dst-state>

    Exactly one state carries ``initial``. Duplicate names, duplicate
    (src, event) pairs and references to undeclared names are errors.
    """
    sections = ("[EVENTS]", "[STATES]", "[TRANS]")
    section = -1
    ev_names: list[str] = []
    ev_ctrl: list[bool] = []
    ev_agent: list[int] = []
    ev_seen: dict[str, int] = {}
    st_names: list[str] = []
    st_seen: dict[str, int] = {}
    initial: int | None = None
    marked: list[int] = []
    triples: list[tuple[int, int, int]] = []
    trans_seen: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in sections:
            want = sections.index(line)
            if want != section + 1:
                raise FormatError(f"unexpected section header {line}", lineno)
            section = want
            continue
        tokens = line.split()
        if section == 0:
            if len(tokens) != 3:
                raise FormatError("event line needs: <name> <c|u> <agent>", lineno)
            name, flag, agent = tokens
            if name in ev_seen:
                raise FormatError(f"duplicate event name {name!r}", lineno)
            if flag not in ("c", "u"):
                raise FormatError(f"controllability flag must be 'c' or 'u', got {flag!r}", lineno)
            try:
                agent_ix = int(agent)
            except ValueError:
                raise FormatError(f"agent must be an integer, got {agent!r}", lineno) from None
            if agent_ix < 1:
                raise FormatError("agent indices start at 1", lineno)
            ev_seen[name] = len(ev_names)
            ev_names.append(name)
            ev_ctrl.append(flag == "c")
            ev_agent.append(agent_ix)
        elif section == 1:
            name = tokens[0]
            if name in st_seen:
                raise FormatError(f"duplicate state name {name!r}", lineno)
            st_seen[name] = len(st_names)
            st_names.append(name)
            flags = tokens[1:]
            if any(f not in ("initial", "marked") for f in flags) or len(set(flags)) != len(flags):
                raise FormatError("state flags must be at most one 'initial' and one 'marked'", lineno)
            if "initial" in flags:
                if initial is not None:
                    raise FormatError("second 'initial' state", lineno)
                initial = st_seen[name]
            if "marked" in flags:
                marked.append(st_seen[name])
        elif section == 2:
            if len(tokens) != 3:
                raise FormatError("transition line needs: <src> <event> <dst>", lineno)
            src, ev, dst = tokens
            if src not in st_seen:
                raise FormatError(f"undeclared state {src!r}", lineno)
            if dst not in st_seen:
                raise FormatError(f"undeclared state {dst!r}", lineno)
            if ev not in ev_seen:
                raise FormatError(f"undeclared event {ev!r}", lineno)
            key = (st_seen[src], ev_seen[ev])
            if key in trans_seen:
                raise FormatError(f"duplicate transition from {src!r} on {ev!r}", lineno)
            trans_seen.add(key)
            triples.append((st_seen[src], ev_seen[ev], st_seen[dst]))
        else:
            raise FormatError("content before [EVENTS] section", lineno)

    if section < 2:
        raise FormatError(f"missing section {sections[section + 1]}")
    if initial is None:
        raise FormatError("no state carries 'initial'")
    try:
        table = EventTable(tuple(ev_names), tuple(ev_ctrl), tuple(ev_agent))
        return Automaton(st_names, table, triples, initial, marked)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_automaton(a: Automaton) -> str:
    """Serialize to the text format; deterministic bytes for a given automaton."""
    lines = ["[EVENTS]"]
    t = a.alphabet
    for e in range(t.n_events):
        lines.append(f"{t.events[e]} {'c' if t.controllable[e] else 'u'} {t.agent_of[e]}")
    lines.append("[STATES]")
    for x, name in enumerate(a.states):
        flags = ""
        if x == a.initial:
            flags += " initial"
        if x in a.marked:
            flags += " marked"
        lines.append(name + flags)
    lines.append("[TRANS]")
    for src, ev, dst in a.iter_transitions():
        lines.append(f"{a.states[src]} {t.events[ev]} {a.states[dst]}")
    return "\n".join(lines) + "\n"


def load_automaton(path) -> Automaton:
    return parse_automaton(Path(path).read_text(encoding="utf-8"))


def save_automaton(a: Automaton, path) -> None:
    Path(path).write_text(write_automaton(a), encoding="utf-8")


# ---------------------------------------------------------------------------
# Operations


def sync_product(automata: Sequence[Automaton]) -> Automaton:
    """Reachable synchronous product over one shared alphabet.

    An event is enabled in a product state iff it is enabled in every
    component; a product state is marked iff every component state is marked.
    Product states are named by joining component state names with ``|`` and
    are ordered by breadth-first discovery from the initial tuple.
    """
    if not automata:
        raise ValueError("sync_product needs at least one automaton")
    first = automata[0]
    for a in automata[1:]:
        if a.alphabet != first.alphabet:
            raise ValueError("alphabet mismatch between product components")
    rest = automata[1:]
    init = tuple(a.initial for a in automata)
    index: dict[tuple[int, ...], int] = {init: 0}
    order: list[tuple[int, ...]] = [init]
    triples: list[tuple[int, int, int]] = []
    queue = deque((init,))
    while queue:
        t = queue.popleft()
        src = index[t]
        for ev, d0 in first.out(t[0]):
            dst = [d0]
            for a, comp in zip(rest, t[1:]):
                nxt = a.step(comp, ev)
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
                triples.append((src, ev, tgt))
    names = ["|".join(a.states[c] for a, c in zip(automata, t)) for t in order]
    marked = [
        i
        for i, t in enumerate(order)
        if all(c in a.marked for a, c in zip(automata, t))
    ]
    return Automaton(names, first.alphabet, triples, 0, marked)


def reachable_trim(a: Automaton) -> Automaton:
    """Restrict to states reachable from the initial state.

    The relative order of surviving states is preserved.
    """
    seen = {a.initial}
    queue = deque((a.initial,))
    while queue:
        x = queue.popleft()
        for _, y in a.out(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    if len(seen) == a.n_states:
        return a
    keep = [x for x in range(a.n_states) if x in seen]
    remap = {old: new for new, old in enumerate(keep)}
    triples = [
        (remap[src], ev, remap[dst])
        for src, ev, dst in a.iter_transitions()
        if src in seen and dst in seen
    ]
    return Automaton(
        [a.states[x] for x in keep],
        a.alphabet,
        triples,
        remap[a.initial],
        [remap[x] for x in a.marked if x in seen],
    )


def apply_state_order(a: Automaton, order: Sequence[int]) -> Automaton:
    """Reindex states: position ``i`` of the result holds old state ``order[i]``.

    ``order`` must be a permutation of 0..n-1. The language and marked
    language are unchanged.
    """
    n = a.n_states
    if len(order) != n or sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the state indices")
    pos = [0] * n
    for new, old in enumerate(order):
        pos[old] = new
    triples = [(pos[src], ev, pos[dst]) for src, ev, dst in a.iter_transitions()]
    return Automaton(
        [a.states[old] for old in order],
        a.alphabet,
        triples,
        pos[a.initial],
        [pos[x] for x in a.marked],
    )


def language_upto(a: Automaton, max_len: int) -> set[tuple[str, ...]]:
    """All event-name traces of length at most ``max_len`` accepted by ``a``."""
    words: set[tuple[str, ...]] = set()
    events = a.alphabet.events

    def walk(x: int, prefix: tuple[str, ...]) -> None:
        words.add(prefix)
        if len(prefix) == max_len:
            return
        for ev, y in a.out(x):
            walk(y, prefix + (events[ev],))

    walk(a.initial, ())
    return words


def marked_language_upto(a: Automaton, max_len: int) -> set[tuple[str, ...]]:
    """Traces of length at most ``max_len`` that end in a marked state."""
    words: set[tuple[str, ...]] = set()
    events = a.alphabet.events

    def walk(x: int, prefix: tuple[str, ...]) -> None:
        if x in a.marked:
            words.add(prefix)
        if len(prefix) == max_len:
            return
        for ev, y in a.out(x):
            walk(y, prefix + (events[ev],))

    walk(a.initial, ())
    return words


def project_state_names(a: Automaton, keep: int, sep: str = "|") -> Automaton:
    """Rename every state to the first ``keep`` ``sep``-joined name components.

    Useful after a synchronous product when trailing components (for example
    monitor automata) add no identifying information. Raises ``ValueError``
    if the projection is not injective on the state set.
    """
    names = [sep.join(name.split(sep)[:keep]) for name in a.states]
    if len(set(names)) != len(names):
        raise ValueError("state-name projection is not injective")
    return Automaton(names, a.alphabet, a.iter_transitions(), a.initial, a.marked)

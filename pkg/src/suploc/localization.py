"""Control covers and congruences: merge machinery, the localization loop,
local-supervisor construction, and validators.

A cover here is always a partition of the supervisor state set (the
algorithms only ever merge or split whole states between cells, so general
overlapping covers never arise). Two states may share a cell for agent k when
they are control consistent: neither enables an event the other's supervisor
withholds from agent k, and their markings agree whenever their
plant-marking indicators agree. A partition is a control congruence when
every cell is pairwise control consistent and, per event, all defined
successors of a cell land in a single cell; the quotient automaton of a
congruence is then a deterministic local supervisor for the agent.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from .automata import Automaton, FormatError
from .context import ControlContext


class InvalidCoverError(ValueError):
    """A supplied cover violates the congruence conditions."""


class Cover:
    """Partition of supervisor states into cells.

    ``cell_of[x]`` is the cell identifier of state x. Identifiers are
    arbitrary ints; :meth:`canonical` renumbers them 0..C-1 ordered by least
    member index. Equality compares the induced partitions, not identifiers.
    """

    __slots__ = ("cell_of",)

    def __init__(self, cell_of: Iterable[int]):
        self.cell_of = tuple(cell_of)

    @classmethod
    def singleton(cls, n_states: int) -> "Cover":
        """Every state in its own cell; trivially a control congruence."""
        return cls(range(n_states))

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]], n_states: int) -> "Cover":
        cell_of = [-1] * n_states
        for ident, cell in enumerate(cells):
            for x in cell:
                if not 0 <= x < n_states:
                    raise ValueError(f"state index {x} out of range")
                if cell_of[x] != -1:
                    raise ValueError(f"state {x} appears in two cells")
                cell_of[x] = ident
        if -1 in cell_of:
            raise ValueError("cells do not cover every state")
        return cls(cell_of)

    @property
    def n_states(self) -> int:
        return len(self.cell_of)

    @property
    def n_cells(self) -> int:
        return len(set(self.cell_of))

    def cells(self) -> list[list[int]]:
        """Cells ordered by least member; members ascending."""
        groups: dict[int, list[int]] = {}
        for x, ident in enumerate(self.cell_of):
            groups.setdefault(ident, []).append(x)
        return sorted(groups.values(), key=lambda cell: cell[0])

    def canonical(self) -> "Cover":
        cell_of = [0] * self.n_states
        for ident, cell in enumerate(self.cells()):
            for x in cell:
                cell_of[x] = ident
        return Cover(cell_of)

    def cell_sets(self) -> frozenset:
        return frozenset(frozenset(cell) for cell in self.cells())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cover):
            return NotImplemented
        return self.n_states == other.n_states and self.cell_sets() == other.cell_sets()

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, cell)) + "}" for cell in self.cells())
        return f"Cover[{inner}]"


def write_cover(cover: Cover, automaton: Automaton) -> str:
    """One line per cell: ``cell <id>: <state-name>...``, canonical order."""
    lines = []
    for ident, cell in enumerate(cover.cells()):
        names = " ".join(automaton.states[x] for x in cell)
        lines.append(f"cell {ident}: {names}")
    return "\n".join(lines) + "\n"


def parse_cover(text: str, automaton: Automaton) -> Cover:
    cells: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        if not head.startswith("cell") or not _:
            raise FormatError("cover line needs: cell <id>: <state-name>...", lineno)
        try:
            members = [automaton.index_of(name) for name in body.split()]
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if not members:
            raise FormatError("empty cell", lineno)
        cells.append(members)
    try:
        return Cover.from_cells(cells, automaton.n_states)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def load_cover(path, automaton: Automaton) -> Cover:
    return parse_cover(Path(path).read_text(encoding="utf-8"), automaton)


def save_cover(cover: Cover, automaton: Automaton, path) -> None:
    Path(path).write_text(write_cover(cover, automaton), encoding="utf-8")


class WaitList:
    """Set of state pairs whose merge is pending; all queries are symmetric."""

    __slots__ = ("_pairs", "_adj")

    def __init__(self):
        self._pairs: set[tuple[int, int]] = set()
        self._adj: dict[int, set[int]] = {}

    def add(self, p: int, q: int) -> None:
        key = (p, q) if p <= q else (q, p)
        if key in self._pairs:
            return
        self._pairs.add(key)
        self._adj.setdefault(p, set()).add(q)
        self._adj.setdefault(q, set()).add(p)

    def contains(self, p: int, q: int) -> bool:
        return ((p, q) if p <= q else (q, p)) in self._pairs

    def neighbors(self, x: int):
        return self._adj.get(x, ())

    def pairs(self):
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)


class _Cells:
    """Union-find over the cells of a cover.

    Each root caches its cell's least state index and member list, so the
    least-member queries and cell merges used by the localization loop are
    near-constant amortized.
    """

    __slots__ = ("_slot_of_state", "_parent", "_min", "_members", "_n_cells")

    def __init__(self, cover: Cover):
        ids = sorted(set(cover.cell_of))
        slot_of_id = {ident: slot for slot, ident in enumerate(ids)}
        self._slot_of_state = [slot_of_id[ident] for ident in cover.cell_of]
        n_cells = len(ids)
        self._parent = list(range(n_cells))
        self._min = [len(cover.cell_of)] * n_cells
        self._members: list[list[int]] = [[] for _ in range(n_cells)]
        for x, slot in enumerate(self._slot_of_state):
            self._members[slot].append(x)
            if x < self._min[slot]:
                self._min[slot] = x
        self._n_cells = n_cells

    def _find(self, slot: int) -> int:
        parent = self._parent
        while parent[slot] != slot:
            parent[slot] = parent[parent[slot]]
            slot = parent[slot]
        return slot

    def cell_id(self, x: int) -> int:
        return self._find(self._slot_of_state[x])

    def same(self, x: int, y: int) -> bool:
        return self._find(self._slot_of_state[x]) == self._find(self._slot_of_state[y])

    def min_of(self, x: int) -> int:
        return self._min[self._find(self._slot_of_state[x])]

    def members(self, x: int) -> list[int]:
        """Member list of x's cell; callers must not mutate it."""
        return self._members[self._find(self._slot_of_state[x])]

    def union_states(self, x: int, y: int) -> None:
        a = self._find(self._slot_of_state[x])
        b = self._find(self._slot_of_state[y])
        if a == b:
            return
        if len(self._members[a]) < len(self._members[b]):
            a, b = b, a
        self._parent[b] = a
        self._members[a].extend(self._members[b])
        self._members[b] = []
        if self._min[b] < self._min[a]:
            self._min[a] = self._min[b]
        self._n_cells -= 1

    @property
    def n_cells(self) -> int:
        return self._n_cells

    def to_cover(self) -> Cover:
        return Cover(self._find(slot) for slot in self._slot_of_state)


def control_consistent(ctx: ControlContext, agent: int, x: int, y: int) -> bool:
    """Whether two supervisor states may share a cell for ``agent``.

    Holds iff neither state enables an event the supervisor withholds from
    the agent in the other state, and the markings agree whenever the
    plant-marking indicators agree. Symmetric in x and y.
    """
    dis = ctx.disabled[agent]
    if ctx.enabled[x] & dis[y] or ctx.enabled[y] & dis[x]:
        return False
    if ctx.plant_marked[x] == ctx.plant_marked[y] and ctx.marked[x] != ctx.marked[y]:
        return False
    return True


class _Frame:
    """One suspended merge-exploration call: snapshots of the two extended
    member lists plus the progress through their cross product."""

    __slots__ = ("left", "right", "li", "ri", "sigmas", "si", "xp", "xq")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.li = 0
        self.ri = 0
        self.sigmas = None
        self.si = 0
        self.xp = -1
        self.xq = -1


def _extended_members(cells: _Cells, wait: WaitList, x: int) -> list[int]:
    # The cell of x plus every cell linked to one of its members through the
    # wait list, ascending by state index.
    find = cells._find
    slot_of = cells._slot_of_state
    members = cells._members
    home = find(slot_of[x])
    base = members[home]
    adj = wait._adj
    linked: set[int] = set()
    for m in base:
        s = adj.get(m)
        if s:
            linked.update(s)
    if not linked:
        return sorted(base)
    seen = {home}
    out = list(base)
    for nb in linked:
        cid = find(slot_of[nb])
        if cid not in seen:
            seen.add(cid)
            out.extend(members[cid])
    out.sort()
    return out


def _check_merge(
    x_i: int,
    x_j: int,
    wait: WaitList,
    floor: int,
    sup: Automaton,
    ctx: ControlContext,
    cells: _Cells,
    agent: int,
) -> bool:
    """Merge-exploration engine; see :func:`check_merge` for the contract.

    The recursion of the textbook formulation is run on an explicit stack so
    call depth cannot overflow on large supervisors; frames snapshot their
    candidate member lists at entry and conditions are evaluated lazily,
    which makes the visit order identical to the recursive version.
    """
    enabled = ctx.enabled
    dis = ctx.disabled[agent]
    marked = ctx.marked
    plant_marked = ctx.plant_marked
    succ = sup.succ_maps
    find = cells._find
    slot_of = cells._slot_of_state
    cell_min = cells._min
    pair_set = wait._pairs

    def make_frame(a: int, b: int) -> _Frame:
        return _Frame(
            _extended_members(cells, wait, a), _extended_members(cells, wait, b)
        )

    stack = [make_frame(x_i, x_j)]
    while stack:
        fr = stack[-1]
        if fr.sigmas is not None:
            pushed = False
            sx = succ[fr.xp]
            sy = succ[fr.xq]
            sigmas = fr.sigmas
            n_sig = len(sigmas)
            while fr.si < n_sig:
                ev = sigmas[fr.si]
                fr.si += 1
                sp = sx[ev]
                sq = sy[ev]
                ra = find(slot_of[sp])
                rb = find(slot_of[sq])
                if ra == rb or ((sp, sq) if sp <= sq else (sq, sp)) in pair_set:
                    continue
                if cell_min[ra] < floor or cell_min[rb] < floor:
                    return False
                stack.append(make_frame(sp, sq))
                pushed = True
                break
            if pushed:
                continue
            fr.sigmas = None
        advanced = False
        left = fr.left
        right = fr.right
        n_right = len(right)
        while fr.li < len(left):
            xp = left[fr.li]
            xq = right[fr.ri]
            fr.ri += 1
            if fr.ri >= n_right:
                fr.ri = 0
                fr.li += 1
            # Self-pairs arise only when the two extended member sets overlap
            # through wait-list links; they are trivially consistent no-ops.
            if xp == xq or ((xp, xq) if xp <= xq else (xq, xp)) in pair_set:
                continue
            if enabled[xp] & dis[xq] or enabled[xq] & dis[xp]:
                return False
            if plant_marked[xp] == plant_marked[xq] and marked[xp] != marked[xq]:
                return False
            wait.add(xp, xq)
            fr.xp = xp
            fr.xq = xq
            fr.sigmas = sorted(enabled[xp] & enabled[xq])
            fr.si = 0
            advanced = True
            break
        if not advanced:
            stack.pop()
    return True


def check_merge(
    x_i: int,
    x_j: int,
    wait: WaitList,
    floor: int,
    sup: Automaton,
    ctx: ControlContext,
    cover: Cover,
    agent: int,
) -> tuple[bool, WaitList]:
    """Decide whether the cells of ``x_i`` and ``x_j`` can merge.

    Examines every state pair drawn from the two cells and the cells already
    linked to them through ``wait``, fails on the first control-consistency
    violation or when a shared-event successor pair would drag in a cell
    whose least member index is below ``floor``, and otherwise follows such
    successor pairs recursively. On success ``wait`` holds every state pair
    whose merge the candidate merge entails; on failure the cover must be
    left unchanged by the caller. ``wait`` is mutated in place and returned.
    """
    flag = _check_merge(x_i, x_j, wait, floor, sup, ctx, _Cells(cover), agent)
    return flag, wait


def localize(
    sup: Automaton,
    ctx: ControlContext,
    agent: int,
    init: Cover | None = None,
    *,
    check_init: bool = False,
) -> Cover:
    """Merge cells of ``init`` into a maximally reduced control congruence.

    ``init`` must itself be a control congruence for the current system (the
    singleton partition, the default, always is). The loop scans candidate
    state pairs in ascending index order, skipping states that are not the
    least member of their cell, and commits a merge by uniting every cell
    linked through the wait list returned by :func:`check_merge`. With
    ``check_init`` the precondition is verified first (debug aid).
    """
    n = sup.n_states
    if init is None:
        init = Cover.singleton(n)
    if len(init.cell_of) != n:
        raise ValueError("init cover size does not match the supervisor")
    if check_init:
        verdict = is_control_congruence(sup, ctx, agent, init)
        if not verdict:
            raise InvalidCoverError(f"init cover is not a control congruence: {verdict.witness}")
    cells = _Cells(init)
    enabled = ctx.enabled
    dis = ctx.disabled[agent]
    marked = ctx.marked
    plant_marked = ctx.plant_marked
    find = cells._find
    slot_of = cells._slot_of_state
    cell_min = cells._min
    for i in range(n - 1):
        if i > cell_min[find(slot_of[i])]:
            continue
        for j in range(i + 1, n):
            if j > cell_min[find(slot_of[j])]:
                continue
            # The first pair the engine would examine is exactly (i, j), so a
            # direct consistency violation can be rejected without setting up
            # a wait list.
            if enabled[i] & dis[j] or enabled[j] & dis[i]:
                continue
            if plant_marked[i] == plant_marked[j] and marked[i] != marked[j]:
                continue
            wait = WaitList()
            if _check_merge(i, j, wait, i, sup, ctx, cells, agent):
                for p, q in wait.pairs():
                    cells.union_states(p, q)
    return cells.to_cover()


@dataclass(frozen=True)
class LocalSupervisor:
    """Quotient automaton of a control congruence for one agent.

    States correspond one to one with the cells of ``source_cover``; each is
    named after its cell's least-indexed member state. ``source_cover`` is
    None for local supervisors loaded from files.
    """

    automaton: Automaton
    source_cover: Cover | None
    agent: int


def build_local_supervisor(sup: Automaton, cover: Cover, agent: int) -> LocalSupervisor:
    """Build the quotient automaton of a control congruence.

    A cell steps to the cell containing any member's successor; the
    congruence successor condition guarantees this is well defined, and a
    conflict (two members stepping into different cells on one event) raises
    :class:`InvalidCoverError`. The initial cell contains the supervisor's
    initial state; a cell is marked iff it contains a marked state.
    """
    if len(cover.cell_of) != sup.n_states:
        raise ValueError("cover size does not match the supervisor")
    cells = cover.cells()
    cell_pos = {}
    for pos, cell in enumerate(cells):
        for x in cell:
            cell_pos[x] = pos
    triples = {}
    for pos, cell in enumerate(cells):
        for x in cell:
            for ev, y in sup.out(x):
                tgt = cell_pos[y]
                prev = triples.get((pos, ev))
                if prev is None:
                    triples[(pos, ev)] = tgt
                elif prev != tgt:
                    raise InvalidCoverError(
                        f"cover is not a control congruence: cell of {sup.states[cell[0]]!r} "
                        f"steps to two cells on {sup.alphabet.events[ev]!r}"
                    )
    names = [sup.states[cell[0]] for cell in cells]
    marked = sorted({cell_pos[x] for x in sup.marked})
    aut = Automaton(
        names,
        sup.alphabet,
        [(src, ev, tgt) for (src, ev), tgt in triples.items()],
        cell_pos[sup.initial],
        marked,
    )
    return LocalSupervisor(automaton=aut, source_cover=cover.canonical(), agent=agent)


@dataclass(frozen=True)
class CoverVerdict:
    """Validation outcome; ``witness`` describes one violation when invalid."""

    valid: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def is_control_congruence(
    sup: Automaton, ctx: ControlContext, agent: int, cover: Cover
) -> CoverVerdict:
    """Check both congruence conditions directly.

    Every intra-cell state pair must be control consistent, and for every
    cell and event, all members' defined successors must land in one cell.
    The first violation found is reported as the witness.
    """
    if len(cover.cell_of) != sup.n_states:
        return CoverVerdict(False, "cover size does not match the supervisor")
    names = sup.states
    events = sup.alphabet.events
    for cell in cover.cells():
        for a_pos, x in enumerate(cell):
            for y in cell[a_pos + 1 :]:
                if not control_consistent(ctx, agent, x, y):
                    return CoverVerdict(
                        False,
                        f"states {names[x]!r} and {names[y]!r} share a cell but are "
                        f"not control consistent for agent {agent}",
                    )
        cell_of = cover.cell_of
        targets: dict[int, int] = {}
        for x in cell:
            for ev, y in sup.out(x):
                prev = targets.get(ev)
                if prev is None:
                    targets[ev] = cell_of[y]
                elif prev != cell_of[y]:
                    return CoverVerdict(
                        False,
                        f"cell of {names[cell[0]]!r} steps to two cells on {events[ev]!r}",
                    )
    return CoverVerdict(True)


def is_maximally_reduced(
    sup: Automaton, ctx: ControlContext, agent: int, cover: Cover
) -> bool:
    """Whether no two cells of a control congruence can be merged.

    Tries every pair of distinct cells and checks whether replacing them by
    their union still yields a control congruence (both conditions; merging
    two cells can only help the successor condition of other cells, so only
    the union cell needs revalidation against the merged partition).
    """
    cells = cover.cells()
    cell_of = list(cover.cell_of)
    for a_pos in range(len(cells)):
        for b_pos in range(a_pos + 1, len(cells)):
            union = cells[a_pos] + cells[b_pos]
            merged = cell_of[:]
            ident = merged[union[0]]
            for x in cells[b_pos]:
                merged[x] = ident
            if _cell_is_consistent(sup, ctx, agent, sorted(union), merged):
                return False
    return True


def _cell_is_consistent(sup, ctx, agent, cell, cell_of) -> bool:
    for a_pos, x in enumerate(cell):
        for y in cell[a_pos + 1 :]:
            if not control_consistent(ctx, agent, x, y):
                return False
    targets: dict[int, int] = {}
    for x in cell:
        for ev, y in sup.out(x):
            prev = targets.get(ev)
            if prev is None:
                targets[ev] = cell_of[y]
            elif prev != cell_of[y]:
                return False
    return True

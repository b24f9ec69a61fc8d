"""Benchmark harness comparing from-scratch localization against the
transformational pipeline on the cat-and-mouse-tower systems.

Protocol per run: draw one random state order for the base supervisor from a
seeded portable generator, reindex the base supervisor with it and localize
it from the singleton partition to obtain the base covers; reindex each
variant supervisor consistently (states shared with the base keep their
relative base order, new states are appended in shuffled order); then, per
agent, time from-scratch localization and the carry-over/isolate/localize
pipeline on the identically indexed variant. Every produced supervisor set
is verified control equivalent to its monolithic supervisor; a failure
aborts the benchmark because it can only mean an implementation bug.

Context-table construction is excluded from all timings (it is identical
work for both procedures), as is quotient-automaton construction.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .automata import Automaton, apply_state_order, reachable_trim, sync_product
from .cmt import CmtConfig, CmtSystem, VARIANTS, gen_cmt, synthesize_cmt
from .context import build_context
from .equivalence import check_control_equivalence
from .localization import Cover, build_local_supervisor, localize
from .rng import SplitMix64
from .transform import carry_over_cover, isolate

BENCH_VARIANTS = tuple(v for v in VARIANTS if v != "base")

CSV_COLUMNS = (
    "variant",
    "agent",
    "run",
    "sl_seconds",
    "isolate_seconds",
    "init_localize_seconds",
    "tsl_seconds",
    "cells_sl",
    "cells_initial_guess",
    "cells_isolated",
    "cells_tsl",
)


class EquivalenceGateError(RuntimeError):
    """A produced supervisor set failed the control-equivalence gate."""


@dataclass(frozen=True)
class BenchRow:
    variant: str
    agent: int
    run: int
    sl_seconds: float
    isolate_seconds: float
    init_localize_seconds: float
    tsl_seconds: float
    cells_sl: int
    cells_initial_guess: int
    cells_isolated: int
    cells_tsl: int


@dataclass(frozen=True)
class BenchAggregate:
    """Mean values over all runs for one (variant, agent) pair."""

    variant: str
    agent: int
    sl_seconds: float
    isolate_seconds: float
    init_localize_seconds: float
    tsl_seconds: float
    pct_change: float
    cells_sl: float
    cells_initial_guess: float
    cells_isolated: float
    cells_tsl: float


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    aggregates: tuple[BenchAggregate, ...]
    runs: int
    seed: int

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            values = [getattr(row, c) for c in CSV_COLUMNS]
            out.write(
                ",".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in values) + "\n"
            )
        return out.getvalue()

    def to_markdown(self) -> str:
        header = (
            "| variant | agent | SL [s] | isolate [s] | init localize [s] | TSL [s] "
            "| change | cells SL | initial guess | isolated | TSL |"
        )
        rule = "|---|---|---|---|---|---|---|---|---|---|---|"
        lines = [header, rule]
        for agg in self.aggregates:
            lines.append(
                f"| {agg.variant} | {agg.agent} | {agg.sl_seconds:.3f} | "
                f"{agg.isolate_seconds:.3f} | {agg.init_localize_seconds:.3f} | "
                f"{agg.tsl_seconds:.3f} | {agg.pct_change:+.0f}% | {agg.cells_sl:.1f} | "
                f"{agg.cells_initial_guess:.1f} | {agg.cells_isolated:.1f} | {agg.cells_tsl:.1f} |"
            )
        return "\n".join(lines) + "\n"

    def aggregate(self, variant: str, agent: int) -> BenchAggregate:
        for agg in self.aggregates:
            if agg.variant == variant and agg.agent == agent:
                return agg
        raise KeyError((variant, agent))

    @property
    def overall_pct_change(self) -> float:
        return sum(a.pct_change for a in self.aggregates) / len(self.aggregates)


@dataclass(frozen=True)
class _Prepared:
    name: str
    system: CmtSystem
    plant: Automaton
    sup: Automaton


def _prepare(cfg: CmtConfig) -> _Prepared:
    system = gen_cmt(cfg)
    plant = reachable_trim(sync_product(system.plants))
    sup = synthesize_cmt(system)
    return _Prepared(cfg.variant, system, plant, sup)


def _variant_order(base_sup: Automaton, variant_sup: Automaton, rng: SplitMix64) -> list[int]:
    """Indices for the variant supervisor: retained states sorted by their
    base index, new states appended in shuffled order."""
    base_pos = {name: i for i, name in enumerate(base_sup.states)}
    retained = [x for x in range(variant_sup.n_states) if variant_sup.states[x] in base_pos]
    retained.sort(key=lambda x: base_pos[variant_sup.states[x]])
    added = [x for x in range(variant_sup.n_states) if variant_sup.states[x] not in base_pos]
    rng.shuffle(added)
    return retained + added


def run_bench(
    variants=BENCH_VARIANTS,
    levels: int = 4,
    animals: int = 1,
    runs: int = 10,
    seed: int = 1,
    timing: str = "strict",
    log=None,
) -> BenchReport:
    """Run the full protocol and aggregate means per (variant, agent).

    ``timing="strict"`` (the default) runs agent pipelines sequentially so
    wall-clock numbers are uncontaminated; ``"concurrent"`` runs them in a
    thread pool, which only makes the cell counts trustworthy.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if timing not in ("strict", "concurrent"):
        raise ValueError("timing must be 'strict' or 'concurrent'")

    def say(msg: str) -> None:
        if log is not None:
            log(msg)

    base = _prepare(CmtConfig(levels=levels, animals=animals, variant="base"))
    prepared = [
        _prepare(CmtConfig(levels=levels, animals=animals, variant=v)) for v in variants
    ]
    say(
        f"base supervisor: {base.sup.n_states} states, {base.sup.n_transitions} transitions; "
        + ", ".join(f"{p.name}: {p.sup.n_states}/{p.sup.n_transitions}" for p in prepared)
    )

    rng = SplitMix64(seed)
    n_agents = base.system.table.n_agents
    rows: list[BenchRow] = []

    for run in range(1, runs + 1):
        order = rng.permutation(base.sup.n_states)
        base_sup = apply_state_order(base.sup, order)
        base_ctx = build_context(base.plant, base_sup, base.system.agents)
        base_covers = [
            localize(base_sup, base_ctx, k) for k in range(1, n_agents + 1)
        ]
        for item in prepared:
            variant_sup = apply_state_order(
                item.sup, _variant_order(base_sup, item.sup, rng)
            )
            ctx = build_context(item.plant, variant_sup, item.system.agents)

            def agent_pipeline(k: int) -> tuple[BenchRow, Cover, Cover]:
                t0 = time.perf_counter()
                cover_sl = localize(variant_sup, ctx, k)
                t1 = time.perf_counter()
                carried = carry_over_cover(base_covers[k - 1], base_sup, variant_sup)
                cover_iso = isolate(
                    base_covers[k - 1], base_sup, variant_sup, ctx, k, carried=carried
                )
                t2 = time.perf_counter()
                cover_tsl = localize(variant_sup, ctx, k, cover_iso)
                t3 = time.perf_counter()
                row = BenchRow(
                    variant=item.name,
                    agent=k,
                    run=run,
                    sl_seconds=t1 - t0,
                    isolate_seconds=t2 - t1,
                    init_localize_seconds=t3 - t2,
                    tsl_seconds=(t2 - t1) + (t3 - t2),
                    cells_sl=cover_sl.n_cells,
                    cells_initial_guess=carried.n_cells,
                    cells_isolated=cover_iso.n_cells,
                    cells_tsl=cover_tsl.n_cells,
                )
                return row, cover_sl, cover_tsl

            agents = range(1, n_agents + 1)
            if timing == "strict":
                results = [agent_pipeline(k) for k in agents]
            else:
                with ThreadPoolExecutor(max_workers=n_agents) as pool:
                    results = list(pool.map(agent_pipeline, agents))

            for side, covers in (
                ("from-scratch", [r[1] for r in results]),
                ("transformational", [r[2] for r in results]),
            ):
                locs = [
                    build_local_supervisor(variant_sup, cover, k)
                    for k, cover in zip(agents, covers)
                ]
                verdict = check_control_equivalence(item.plant, variant_sup, locs)
                if not verdict:
                    raise EquivalenceGateError(
                        f"{side} supervisors for {item.name} run {run} are not control "
                        f"equivalent: {verdict.direction}; trace {verdict.counterexample}"
                    )
            rows.extend(r[0] for r in results)
            say(f"run {run}/{runs} {item.name}: ok")

    aggregates = []
    for item in prepared:
        for k in range(1, n_agents + 1):
            sub = [r for r in rows if r.variant == item.name and r.agent == k]

            def mean(attr, sub=sub):
                return sum(getattr(r, attr) for r in sub) / len(sub)

            sl = mean("sl_seconds")
            tsl = mean("tsl_seconds")
            aggregates.append(
                BenchAggregate(
                    variant=item.name,
                    agent=k,
                    sl_seconds=sl,
                    isolate_seconds=mean("isolate_seconds"),
                    init_localize_seconds=mean("init_localize_seconds"),
                    tsl_seconds=tsl,
                    pct_change=(tsl - sl) / sl * 100.0,
                    cells_sl=mean("cells_sl"),
                    cells_initial_guess=mean("cells_initial_guess"),
                    cells_isolated=mean("cells_isolated"),
                    cells_tsl=mean("cells_tsl"),
                )
            )
    return BenchReport(tuple(rows), tuple(aggregates), runs, seed)

"""Supervisor localization for discrete-event systems.

Compute per-agent local supervisors from a monolithic supervisor, and, after
the system model is edited, transform previously computed results into local
supervisors for the edited system instead of starting over.
"""

from .automata import (
    Automaton,
    EventTable,
    FormatError,
    apply_state_order,
    language_upto,
    load_automaton,
    marked_language_upto,
    parse_automaton,
    project_state_names,
    reachable_trim,
    save_automaton,
    sync_product,
    write_automaton,
)
from .bench import BenchReport, EquivalenceGateError, run_bench
from .cmt import CmtConfig, CmtSystem, gen_cmt, synthesize_cmt
from .context import (
    AgentSpec,
    ControlContext,
    SynthesisEmptyError,
    agents_from_table,
    build_context,
    synthesize_monolithic,
)
from .equivalence import (
    EquivalenceVerdict,
    check_control_equivalence,
    controlled_behavior,
    replay_counterexample,
)
from .localization import (
    Cover,
    CoverVerdict,
    InvalidCoverError,
    LocalSupervisor,
    WaitList,
    build_local_supervisor,
    check_merge,
    control_consistent,
    is_control_congruence,
    is_maximally_reduced,
    load_cover,
    localize,
    parse_cover,
    save_cover,
    write_cover,
)
from .rng import SplitMix64
from .transform import (
    AgentMapping,
    StateCorrespondence,
    carry_over_cover,
    isolate,
    state_correspondence,
    tsl,
)

__version__ = "0.1.0"

__all__ = [
    "AgentMapping",
    "AgentSpec",
    "Automaton",
    "BenchReport",
    "CmtConfig",
    "CmtSystem",
    "ControlContext",
    "Cover",
    "CoverVerdict",
    "EquivalenceGateError",
    "EquivalenceVerdict",
    "EventTable",
    "FormatError",
    "InvalidCoverError",
    "LocalSupervisor",
    "SplitMix64",
    "StateCorrespondence",
    "SynthesisEmptyError",
    "WaitList",
    "agents_from_table",
    "apply_state_order",
    "build_context",
    "build_local_supervisor",
    "carry_over_cover",
    "check_control_equivalence",
    "check_merge",
    "control_consistent",
    "controlled_behavior",
    "gen_cmt",
    "is_control_congruence",
    "is_maximally_reduced",
    "isolate",
    "language_upto",
    "load_automaton",
    "load_cover",
    "localize",
    "marked_language_upto",
    "parse_automaton",
    "parse_cover",
    "project_state_names",
    "reachable_trim",
    "replay_counterexample",
    "run_bench",
    "save_automaton",
    "save_cover",
    "state_correspondence",
    "sync_product",
    "synthesize_cmt",
    "synthesize_monolithic",
    "tsl",
    "write_automaton",
    "write_cover",
]

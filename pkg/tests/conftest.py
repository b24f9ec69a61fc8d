"""Shared fixtures: the five-state corpus system and the tower systems."""

from __future__ import annotations

from pathlib import Path

import pytest

from suploc.automata import load_automaton, reachable_trim, sync_product
from suploc.cmt import CmtConfig, gen_cmt, synthesize_cmt
from suploc.context import agents_from_table, build_context

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def corpus_sup():
    return load_automaton(DATA / "example1.aut")


@pytest.fixture(scope="session")
def corpus_plant():
    return load_automaton(DATA / "example1_plant.aut")


@pytest.fixture(scope="session")
def corpus_variant_plant():
    return load_automaton(DATA / "example1_variant_plant.aut")


@pytest.fixture(scope="session")
def corpus_agents(corpus_sup):
    return agents_from_table(corpus_sup.alphabet)


@pytest.fixture(scope="session")
def corpus_ctx(corpus_plant, corpus_sup, corpus_agents):
    return build_context(corpus_plant, corpus_sup, corpus_agents)


@pytest.fixture(scope="session")
def corpus_variant_ctx(corpus_variant_plant, corpus_sup, corpus_agents):
    return build_context(corpus_variant_plant, corpus_sup, corpus_agents)


@pytest.fixture(scope="session")
def cmt_systems():
    """Generated tower systems for the base and all five variants."""
    return {
        v: gen_cmt(CmtConfig(levels=4, animals=1, variant=v))
        for v in ("base", "v1", "v2", "v3", "v4", "v5")
    }


@pytest.fixture(scope="session")
def cmt_supervisors(cmt_systems):
    return {v: synthesize_cmt(system) for v, system in cmt_systems.items()}


@pytest.fixture(scope="session")
def cmt_plants(cmt_systems):
    return {
        v: reachable_trim(sync_product(system.plants))
        for v, system in cmt_systems.items()
    }

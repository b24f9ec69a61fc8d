"""Tower generator: topology, variants, supervisor sizes, safety invariants."""

from pathlib import Path

import pytest

from suploc.cmt import CmtConfig, gen_cmt, synthesize_cmt

DATA = Path(__file__).parent / "data"

PUBLISHED_SIZES = {
    "base": (362, 1159),
    "v1": (362, 1142),
    "v2": (375, 1214),
    "v3": (270, 853),
    "v4": (309, 986),
    "v5": (403, 1304),
}


def split_config(name):
    cat, mouse = name.split("|")
    return cat, mouse


def test_single_level_has_no_interlevel_events():
    system = gen_cmt(CmtConfig(levels=1, animals=1))
    for name in system.table.events:
        src, dst = name[1:].split("__")
        assert src.split("_")[0] == dst.split("_")[0] == "1"


def test_single_level_event_list_matches_golden():
    system = gen_cmt(CmtConfig(levels=1, animals=1))
    t = system.table
    lines = [
        f"{t.events[e]} {'c' if t.controllable[e] else 'u'} {t.agent_of[e]}"
        for e in range(t.n_events)
    ]
    golden = (DATA / "cmt_l1_events.txt").read_text(encoding="utf-8").splitlines()
    assert lines == golden


def test_event_agent_is_source_level():
    system = gen_cmt(CmtConfig(levels=4, animals=1))
    t = system.table
    for e, name in enumerate(t.events):
        src_level = int(name[1:].split("__")[0].split("_")[0])
        assert t.agent_of[e] == src_level
    assert t.n_agents == 4


def test_only_cat_doors_between_rooms_2_and_4_uncontrollable():
    system = gen_cmt(CmtConfig(levels=4, animals=1))
    t = system.table
    for e, name in enumerate(t.events):
        src, dst = name[1:].split("__")
        rooms = {src.split("_")[1], dst.split("_")[1]}
        if not t.controllable[e]:
            assert name.startswith("c")
            assert rooms == {"2", "4"}
    uncontrollable = [e for e in range(t.n_events) if not t.controllable[e]]
    assert len(uncontrollable) == 8  # two directions on each of four levels


def test_variant2_all_controllable():
    system = gen_cmt(CmtConfig(levels=4, animals=1, variant="v2"))
    assert all(system.table.controllable)


def test_variant1_removes_one_cat_door():
    base = gen_cmt(CmtConfig(levels=4, animals=1))
    v1 = gen_cmt(CmtConfig(levels=4, animals=1, variant="v1"))
    missing = set(base.table.events) - set(v1.table.events)
    assert missing == {"c2_3__2_4"}


def test_variant4_removes_room(cmt_supervisors):
    v4 = gen_cmt(CmtConfig(levels=4, animals=1, variant="v4"))
    for plant in v4.plants:
        assert "L1R5" not in plant.states
    for name in cmt_supervisors["v4"].states:
        assert "L1R5" not in name
    # the base supervisor does visit the removed room
    assert any("L1R5" in name for name in cmt_supervisors["base"].states)


def test_variant5_adds_room(cmt_supervisors):
    v5 = gen_cmt(CmtConfig(levels=4, animals=1, variant="v5"))
    for plant in v5.plants:
        assert "L1R6" in plant.states
    assert any("L1R6" in name for name in cmt_supervisors["v5"].states)
    assert all("L1R6" not in name for name in cmt_supervisors["base"].states)


def test_initial_state_encodes_start_configuration(cmt_supervisors):
    sup = cmt_supervisors["base"]
    assert sup.states[sup.initial] == "L1R1|L4R5"


@pytest.mark.parametrize("variant", sorted(PUBLISHED_SIZES))
def test_supervisor_sizes_match_published(cmt_supervisors, variant):
    sup = cmt_supervisors[variant]
    assert (sup.n_states, sup.n_transitions) == PUBLISHED_SIZES[variant]


def test_supervisor_never_colocates(cmt_supervisors):
    for variant, sup in cmt_supervisors.items():
        for name in sup.states:
            cat, mouse = split_config(name)
            assert cat != mouse, f"{variant}: cat and mouse share {cat}"


def test_uncontrollable_door_never_withheld(cmt_supervisors, cmt_plants):
    # wherever the plant can push the cat through the 2-4 door, the
    # supervisor keeps the move enabled
    sup = cmt_supervisors["base"]
    plant = cmt_plants["base"]
    t = sup.alphabet
    plant_index = {name: x for x, name in enumerate(plant.states)}
    for x, name in enumerate(sup.states):
        q = plant_index[name]
        for e in range(t.n_events):
            if t.controllable[e]:
                continue
            if plant.step(q, e) is not None:
                assert sup.step(x, e) is not None


def test_variant3_keeps_cats_off_top_level(cmt_supervisors):
    for name in cmt_supervisors["v3"].states:
        cat, _ = split_config(name)
        assert not cat.startswith("L4")
    # mice still reach the top level
    assert any(m.startswith("L4") for _, m in map(split_config, cmt_supervisors["v3"].states))


def test_two_animals_per_kind_synthesizes():
    system = gen_cmt(CmtConfig(levels=1, animals=2))
    assert len(system.plants) == 4
    sup = synthesize_cmt(system)
    assert sup.n_states > 0
    for name in sup.states:
        c1, c2, m1, m2 = name.split("|")
        assert {c1, c2}.isdisjoint({m1, m2})


def test_degenerate_tower_synthesizes():
    system = gen_cmt(CmtConfig(levels=1, animals=1))
    sup = synthesize_cmt(system)
    assert sup.states[sup.initial] == "L1R1|L1R5"
    assert sup.n_states > 1


def test_bad_configs_rejected():
    with pytest.raises(ValueError):
        CmtConfig(levels=0)
    with pytest.raises(ValueError):
        CmtConfig(animals=0)
    with pytest.raises(ValueError):
        CmtConfig(variant="v9")

from cellulat.agents import condition_atoms
from cellulat.columns import (
    AgencyColumn,
    column_diff,
    detect_columns,
    level_occupancy,
)
from cellulat.generate import random_model
from cellulat.model import (
    AgentDef,
    Effect,
    Level,
    Locus,
    ModelDef,
    SignalAtom,
    SignalSpecies,
)

from conftest import tiny_model


def brute_force_columns(model):
    """Independent oracle: enumerate every (agent, locus) pair and group."""
    pairs = []
    for agent in model.agents:
        for atom in condition_atoms(agent):
            if isinstance(atom, SignalAtom):
                pairs.append((agent.id, atom.locus))
        for eff in agent.effects:
            if isinstance(eff, Effect):
                pairs.append((agent.id, eff.locus))
    regions = {locus.region for _, locus in pairs}
    columns = set()
    for region in regions:
        members = frozenset(a for a, locus in pairs if locus.region == region)
        levels = frozenset(locus.level for _, locus in pairs if locus.region == region)
        if len(levels) >= 2:
            columns.add(AgencyColumn(region, levels, members))
    return frozenset(columns)


def two_region_model():
    lvl = [Level("m", 0, "membrane"), Level("c", 1, "cytosol")]
    sp = [SignalSpecies("s1"), SignalSpecies("s2")]
    mk = lambda aid, sense_loc, eff_loc: AgentDef(
        id=aid, kind="internal",
        condition=SignalAtom("s1", sense_loc, ">=", 1.0),
        effects=(Effect("produce", "s2", eff_loc, 1.0),),
    )
    agents = [
        mk("a1", Locus("m", "r1"), Locus("c", "r1")),
        mk("a2", Locus("c", "r1"), Locus("c", "r1")),
        mk("b1", Locus("m", "r2"), Locus("c", "r2")),
    ]
    return ModelDef(name="tworeg", levels=lvl, species=sp, agents=agents)


class TestDetect:
    def test_ca2plus_single_column(self, ca2plus_model, ca2plus_expected):
        columns = detect_columns(ca2plus_model)
        expected = ca2plus_expected["column"]
        assert len(columns) == expected["expected_columns"] == 1
        column = next(iter(columns))
        assert column.region == expected["region"]
        assert len(column.levels_spanned) >= expected["min_levels"]
        assert set(expected["required_members"]) <= column.members

    def test_single_level_model_has_no_columns(self):
        agent = AgentDef(
            id="a", kind="internal",
            condition=SignalAtom("A", Locus("membrane"), ">=", 1.0),
            effects=(Effect("produce", "B", Locus("membrane"), 1.0),),
        )
        assert detect_columns(tiny_model(agents=[agent])) == frozenset()

    def test_two_disjoint_regions(self):
        columns = detect_columns(two_region_model())
        by_region = {c.region: c for c in columns}
        assert set(by_region) == {"r1", "r2"}
        assert by_region["r1"].members == frozenset({"a1", "a2"})
        assert by_region["r2"].members == frozenset({"b1"})
        assert not (by_region["r1"].members & by_region["r2"].members)

    def test_matches_brute_force_oracle(self, ca2plus_model):
        assert detect_columns(ca2plus_model) == brute_force_columns(ca2plus_model)

    def test_matches_brute_force_on_random_models(self):
        for seed in range(40):
            model = random_model(seed)
            assert detect_columns(model) == brute_force_columns(model), seed

    def test_invariant_under_agent_reordering(self):
        model = two_region_model()
        reordered = ModelDef(
            name=model.name,
            levels=list(model.levels),
            species=list(model.species),
            agents=list(reversed(model.agents)),
        )
        assert detect_columns(model) == detect_columns(reordered)

    def test_every_column_spans_two_levels(self):
        for seed in range(30):
            for column in detect_columns(random_model(seed)):
                assert len(column.levels_spanned) >= 2


class TestDiff:
    def col(self, region, levels, members):
        return AgencyColumn(region, frozenset(levels), frozenset(members))

    def test_identical_inputs_empty_report(self):
        before = detect_columns(two_region_model())
        report = column_diff(before, before)
        assert report.is_empty

    def test_vanished_when_span_collapses(self):
        model = two_region_model()
        without_b1 = ModelDef(
            name="x",
            levels=list(model.levels),
            species=list(model.species),
            agents=[a for a in model.agents if a.id != "b1"],
        )
        report = column_diff(detect_columns(model), detect_columns(without_b1))
        assert report.vanished == frozenset({"r2"})
        assert report.appeared == frozenset()

    def test_appeared_when_bridge_added(self):
        model = two_region_model()
        bridge = AgentDef(
            id="z", kind="internal",
            condition=SignalAtom("s1", Locus("m", "r3"), ">=", 1.0),
            effects=(Effect("produce", "s2", Locus("c", "r3"), 1.0),),
        )
        extended = ModelDef(
            name="x",
            levels=list(model.levels),
            species=list(model.species),
            agents=list(model.agents) + [bridge],
        )
        report = column_diff(detect_columns(model), detect_columns(extended))
        assert report.appeared == frozenset({"r3"})

    def test_membership_change(self):
        before = frozenset({self.col("r", ["m", "c"], ["a", "b"])})
        after = frozenset({self.col("r", ["m", "c"], ["a", "c"])})
        report = column_diff(before, after)
        assert report.membership_changes == (("r", frozenset({"c"}), frozenset({"b"})),)

    def test_merge_and_split_are_swap_symmetric(self):
        before = frozenset(
            {self.col("r1", ["m", "c"], ["a", "b"]), self.col("r2", ["m", "c"], ["c", "d"])}
        )
        after = frozenset({self.col("r3", ["m", "c"], ["a", "b", "c", "d"])})
        forward = column_diff(before, after)
        assert forward.merged == (("r3", frozenset({"r1", "r2"})),)
        assert forward.split == ()
        backward = column_diff(after, before)
        assert backward.split == (("r3", frozenset({"r1", "r2"})),)
        assert backward.merged == ()
        assert forward.appeared == backward.vanished
        assert forward.vanished == backward.appeared

    def test_antisymmetry_on_random_models(self):
        for seed in range(15):
            a = detect_columns(random_model(seed))
            b = detect_columns(random_model(seed + 1000))
            fwd, back = column_diff(a, b), column_diff(b, a)
            assert fwd.appeared == back.vanished and fwd.vanished == back.appeared


class TestOccupancy:
    def test_ca2plus_membrane_affecting(self, ca2plus_model):
        occupancy = level_occupancy(ca2plus_model)
        assert {"GPCR", "Gprotein", "PLCbeta"} <= occupancy["membrane"].affecting

    def test_empty_model_all_sets_empty(self):
        occupancy = level_occupancy(tiny_model(initializers=[]))
        for summary in occupancy.values():
            assert summary.sensing == summary.affecting == summary.species == frozenset()

    def test_produced_species_listed_on_level(self):
        agent = AgentDef(
            id="a", kind="internal",
            condition=SignalAtom("A", Locus("membrane"), ">=", 1.0),
            effects=(Effect("produce", "B", Locus("cytosol"), 1.0),),
        )
        occupancy = level_occupancy(tiny_model(agents=[agent], initializers=[]))
        assert "B" in occupancy["cytosol"].species
        assert "a" in occupancy["cytosol"].affecting
        assert "a" in occupancy["membrane"].sensing

    def test_initialized_species_listed(self):
        occupancy = level_occupancy(tiny_model())
        assert "A" in occupancy["membrane"].species

    def test_all_declared_levels_present(self, ca2plus_model):
        occupancy = level_occupancy(ca2plus_model)
        assert set(occupancy) == {l.name for l in ca2plus_model.levels}
        assert occupancy["nucleus"].sensing == frozenset()

import pytest

from cellulat.errors import LesionError, LesionSpecError
from cellulat.generate import random_model
from cellulat.dsl import validate
from cellulat.lesions import (
    apply_lesion,
    parse_lesion_spec,
    run_paired,
    validate_lesion,
)
from cellulat.model import (
    AgentDef,
    Effect,
    Lesion,
    LigandAtom,
    Locus,
    ModelDef,
    StimulusEntry,
)
from cellulat.scheduler import SimState, reference_step, run, step

from conftest import MEMBRANE, relay_model, tiny_model

GPCR_PATCH_CYTOSOL = Locus("cytosol", "gpcr_patch")


class TestSpecGrammar:
    def test_knockout(self):
        lesion = parse_lesion_spec("knockout:PLCbeta@0")
        assert lesion.kind == "knockout" and lesion.agent == "PLCbeta"
        assert lesion.at_tick == 0 and lesion.until_tick is None

    def test_windowed_block(self):
        lesion = parse_lesion_spec("block:GPCR@3..9")
        assert lesion.kind == "receptor_block"
        assert (lesion.at_tick, lesion.until_tick) == (3, 9)

    def test_attenuate(self):
        lesion = parse_lesion_spec("attenuate:PLCbeta:0.5@2")
        assert lesion.kind == "attenuate" and lesion.factor == 0.5

    def test_clamp_with_region(self):
        lesion = parse_lesion_spec("clamp:Ca2plus:cytosol/gpcr_patch:0.0@0..10")
        assert lesion.kind == "clamp"
        assert lesion.locus == GPCR_PATCH_CYTOSOL and lesion.value == 0.0

    def test_clamp_default_region(self):
        lesion = parse_lesion_spec("clamp:A:membrane:2.5@1")
        assert lesion.locus == Locus("membrane", "global")

    @pytest.mark.parametrize(
        "bad",
        [
            "",
            "knockout:X",
            "knockout:@0",
            "smash:X@0",
            "attenuate:X@0",
            "attenuate:X:abc@0",
            "clamp:X:lvl@0",
            "clamp:X:lvl/a/b:1.0@0",
            "knockout:X@-1",
        ],
    )
    def test_malformed_specs_rejected(self, bad):
        with pytest.raises(LesionSpecError):
            parse_lesion_spec(bad)


class TestValidation:
    def test_unknown_agent(self, ca2plus_model):
        with pytest.raises(LesionError):
            validate_lesion(ca2plus_model, parse_lesion_spec("knockout:nobody@0"))

    def test_window_in_the_past(self, ca2plus_model):
        sim = SimState(ca2plus_model)
        run(sim, 5)
        with pytest.raises(LesionError):
            apply_lesion(sim, parse_lesion_spec("knockout:PKC@2"))

    def test_future_window_accepted_on_live_sim(self, ca2plus_model):
        sim = SimState(ca2plus_model)
        run(sim, 5)
        apply_lesion(sim, parse_lesion_spec("knockout:PKC@5"))
        assert len(sim.lesions) == 1

    def test_attenuate_factor_domain(self, ca2plus_model):
        for bad in ("attenuate:PKC:0.0@0", "attenuate:PKC:1.0@0", "attenuate:PKC:1.5@0"):
            with pytest.raises(LesionError):
                validate_lesion(ca2plus_model, parse_lesion_spec(bad))

    def test_block_requires_interface(self, ca2plus_model):
        with pytest.raises(LesionError):
            validate_lesion(ca2plus_model, parse_lesion_spec("block:PKC@0"))
        validate_lesion(ca2plus_model, parse_lesion_spec("block:GPCR@0"))

    def test_clamp_flag_must_be_binary(self, ca2plus_model):
        with pytest.raises(LesionError):
            validate_lesion(
                ca2plus_model, parse_lesion_spec("clamp:PKC_active:cytosol/gpcr_patch:0.5@0")
            )

    def test_empty_window_rejected(self, ca2plus_model):
        lesion = Lesion(id="x", kind="knockout", at_tick=5, until_tick=2, agent="PKC")
        with pytest.raises(LesionError):
            validate_lesion(ca2plus_model, lesion)


def species_trace(model, lesions, n_ticks, species_names, seed=0):
    """Per-tick quantities of the named species, summed over loci."""
    sim = SimState(model, seed=seed, lesions=list(lesions))
    trace = []
    for _ in range(n_ticks):
        step(sim)
        totals = {name: 0.0 for name in species_names}
        for (sp, _locus), q in sim.board.quantities().items():
            if sp in totals:
                totals[sp] += q
        trace.append(totals)
    return trace


class TestKnockout:
    def test_plcbeta_knockout_cuts_downstream(self, ca2plus_model, ca2plus_expected):
        names = ca2plus_expected["knockout_plcbeta_zero_species"]
        trace = species_trace(ca2plus_model, [parse_lesion_spec("knockout:PLCbeta@0")], 100, names)
        for totals in trace:
            assert all(v == 0.0 for v in totals.values())

    def test_knockout_equals_removing_the_agent(self, ca2plus_model):
        # Downstream-cut oracle: a reference run of the model without the agent.
        lesioned = SimState(ca2plus_model, seed=3, lesions=[parse_lesion_spec("knockout:PLCbeta@0")])
        cut_model = ModelDef(
            name=ca2plus_model.name,
            levels=list(ca2plus_model.levels),
            species=list(ca2plus_model.species),
            ligands=list(ca2plus_model.ligands),
            initializers=list(ca2plus_model.initializers),
            agents=[a for a in ca2plus_model.agents if a.id != "PLCbeta"],
            stimuli=list(ca2plus_model.stimuli),
            metadata=dict(ca2plus_model.metadata),
        )
        cut = SimState(cut_model, seed=3)
        for _ in range(40):
            step(lesioned)
            reference_step(cut)
            assert lesioned.board.quantities() == cut.board.quantities()

    def test_knockout_dominance_on_random_models(self):
        checked = 0
        seed = 0
        while checked < 15:
            model = random_model(seed)
            seed += 1
            if [d for d in validate(model) if d.severity == "error"]:
                continue
            victim = model.agents[len(model.agents) // 2].id
            sim = SimState(model, seed=seed, lesions=[
                Lesion(id="k", kind="knockout", at_tick=0, agent=victim)
            ])
            reports = run(sim, 15)
            assert all(
                record.count == 0
                for report in reports
                for record in report.firings
                if record.agent == victim
            )
            assert all(victim not in [e.agent for e in report.agenda] for report in reports)
            checked += 1

    def test_windowed_knockout_releases(self, ca2plus_model):
        # GPCR knocked out for ticks 0..4 only: chain starts 5 ticks late.
        lesion = parse_lesion_spec("knockout:GPCR@0..4")
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        reports = run(sim, 10)
        first = {}
        for report in reports:
            for record in report.firings:
                if record.fired and record.agent not in first:
                    first[record.agent] = report.tick
        assert first["GPCR"] == 5 and first["Gprotein"] == 6


class TestAttenuate:
    def test_half_factor_halves_amounts(self, ca2plus_model):
        lesion = parse_lesion_spec("attenuate:PLCbeta:0.5@0")
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        reports = run(sim, 3)
        plc_events = [
            ev for report in reports for ev in report.events if ev.actor == "PLCbeta"
        ]
        assert plc_events, "PLCbeta never fired"
        for ev in plc_events:
            assert ev.amount == 0.5
        assert sim.board.read("IP3", GPCR_PATCH_CYTOSOL) == 0.5


class TestClamp:
    def test_clamp_calcium_silences_pkc(self, ca2plus_model, ca2plus_expected):
        spec = ca2plus_expected["clamp_zero"]
        lesion = parse_lesion_spec(
            f"clamp:{spec['species']}:{spec['level']}/{spec['region']}:0.0@0"
        )
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        reports = run(sim, 50)
        pkc_count = sum(
            record.count for report in reports for record in report.firings
            if record.agent == spec["never_fires"]
        )
        assert pkc_count == 0

    def test_clamp_event_has_lesion_actor_and_applies_last(self, ca2plus_model):
        lesion = parse_lesion_spec("clamp:IP3:cytosol/gpcr_patch:7.0@0")
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        report = run(sim, 3)[-1]
        assert report.events[-1].actor == "lesion"
        assert report.events[-1].resulting == 7.0
        assert sim.board.read("IP3", GPCR_PATCH_CYTOSOL) == 7.0

    def test_clamp_window_release_behaves_like_no_lesion(self):
        # Interface re-sets the flag every tick, so once the clamp window
        # closes the upstream state coincides and the runs must agree.
        setter = AgentDef(
            id="setter", kind="interface",
            condition=LigandAtom("L", ">=", 1.0),
            effects=(Effect("set", "F", MEMBRANE, 1.0),),
        )
        model = tiny_model(agents=[setter], stimuli=[StimulusEntry("L", 1.0, 0, 30)], initializers=[])
        lesion = parse_lesion_spec("clamp:F:membrane:0.0@5..10")

        baseline = SimState(model, seed=1)
        lesioned = SimState(model, seed=1, lesions=[lesion])
        baseline_reports = run(baseline, 20)
        lesioned_reports = run(lesioned, 20)
        for tick in range(5, 11):
            assert any(
                ev.actor == "lesion" for ev in lesioned_reports[tick].events
            )
        assert lesioned_reports[11:] == baseline_reports[11:]
        assert baseline.board.quantities() == lesioned.board.quantities()


class TestRunPaired:
    def test_no_lesions_no_divergence(self, ca2plus_model):
        paired = run_paired(ca2plus_model, None, [], 20, seed=5)
        divergence = paired.divergence
        assert divergence.first_divergence_tick is None
        assert all(v == 0.0 for v in divergence.species_max_delta.values())
        assert all(v == 0 for v in divergence.firing_count_delta.values())

    def test_knockout_of_firing_agent_diverges(self):
        model = relay_model()
        paired = run_paired(
            model, None, [parse_lesion_spec("knockout:conv@0")], 10, seed=0
        )
        assert paired.divergence.first_divergence_tick is not None

    def test_knockout_of_never_firing_agent_is_invisible(self):
        from cellulat.model import SignalAtom

        base = relay_model()
        never = AgentDef(
            id="never", kind="internal",
            condition=SignalAtom("B", Locus("membrane"), ">=", 99.0),
            effects=(Effect("produce", "B", Locus("cytosol"), 1.0),),
        )
        model = tiny_model(
            agents=list(base.agents) + [never],
            stimuli=[StimulusEntry("L", 1.0, 0, 50)],
            initializers=[],
        )
        paired = run_paired(model, None, [parse_lesion_spec("knockout:never@0")], 15, seed=2)
        assert paired.divergence.first_divergence_tick is None
        assert paired.divergence.firing_count_delta["never"] == 0

    def test_gprotein_knockout_diverges_at_its_first_firing_tick(self, ca2plus_model):
        paired = run_paired(
            ca2plus_model, None, [parse_lesion_spec("knockout:Gprotein@0")], 20, seed=0
        )
        assert paired.divergence.first_divergence_tick == 1
        assert paired.divergence.firing_count_delta["Gprotein"] < 0

    def test_baseline_purity(self, ca2plus_model):
        paired = run_paired(
            ca2plus_model, None, [parse_lesion_spec("knockout:PLCbeta@0")], 25, seed=11
        )
        unpaired = tuple(run(SimState(ca2plus_model, seed=11), 25))
        assert paired.baseline == unpaired

    def test_paired_determinism(self, ca2plus_model):
        lesions = [parse_lesion_spec("attenuate:PLCbeta:0.5@3..12")]
        a = run_paired(ca2plus_model, None, lesions, 18, seed=4)
        b = run_paired(ca2plus_model, None, lesions, 18, seed=4)
        assert a == b


class TestReceptorBlock:
    def test_block_silences_interface_but_keeps_it_on_agenda(self, ca2plus_model):
        lesion = parse_lesion_spec("block:GPCR@0")
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        reports = run(sim, 10)
        for report in reports:
            for record in report.firings:
                assert not (record.agent == "GPCR" and record.fired)
        # Still polled onto the agenda; skips on its (blocked) condition.
        assert any(
            entry.agent == "GPCR" for report in reports for entry in report.agenda
        )
        assert sim.board.quantities() == {
            ("PIP2", Locus("membrane", "gpcr_patch")): 100.0,
            ("ER_Ca_store", Locus("endoplasmic_reticulum", "gpcr_patch")): 50.0,
        }

    def test_block_window_release(self, ca2plus_model):
        lesion = parse_lesion_spec("block:GPCR@0..2")
        sim = SimState(ca2plus_model, seed=0, lesions=[lesion])
        reports = run(sim, 6)
        gpcr_first = next(
            report.tick for report in reports
            for record in report.firings if record.agent == "GPCR" and record.fired
        )
        assert gpcr_first == 3

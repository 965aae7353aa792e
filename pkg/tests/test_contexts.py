import json

import intentlang as il
from intentlang import contexts as cx
from intentlang import intents as it
from intentlang.intents import candidate_intents
from intentlang.worlds import Adjacent, At, HoldsItem, PlayerIn


class TestAbstract:
    def test_initial_fluents(self, g0):
        ctx = cx.abstract(g0)
        assert PlayerIn("lab") in ctx.fluents
        assert At("flask", "lab") in ctx.fluents
        assert At("book", "library") in ctx.fluents

    def test_held_item_has_no_at_fact(self, g0):
        g1 = il.step(g0, it.Take("flask")).next
        ctx = cx.abstract(g1)
        assert HoldsItem("flask") in ctx.fluents
        assert not any(isinstance(f, At) and f.entity == "flask"
                       for f in ctx.fluents)

    def test_abstract_is_deterministic(self, g0):
        assert cx.abstract(g0) == cx.abstract(g0)

    def test_soundness_every_fluent_holds(self, g0, farm0):
        for state in (g0, farm0):
            ctx = cx.abstract(state)
            for fluent in ctx.fluents:
                assert il.holds(state, fluent)
            for fact in ctx.static:
                assert il.holds(state, fact)


class TestTypecheck:
    def test_take_flask_ok(self, g0):
        assert isinstance(cx.typecheck(cx.abstract(g0), it.Take("flask")), cx.Ok)

    def test_move_north_ill_typed(self, g0):
        verdict = cx.typecheck(cx.abstract(g0), it.Move("north"))
        assert isinstance(verdict, cx.IllTyped)
        assert verdict.rule == "move"
        assert verdict.missing == (Adjacent("lab", "north", "_"),)

    def test_take_fnord_ill_typed(self, g0):
        verdict = cx.typecheck(cx.abstract(g0), it.Take("fnord"))
        assert isinstance(verdict, cx.IllTyped)
        assert verdict.rule == "take"
        assert verdict.missing == (At("fnord", "lab"),)

    def test_ill_typed_verdicts_list_missing_premises(self, g0):
        ctx = cx.abstract(g0)
        for intent in candidate_intents(g0):
            verdict = cx.typecheck(ctx, intent)
            if isinstance(verdict, cx.IllTyped):
                assert len(verdict.missing) >= 1

    def test_farm_select_requires_possession(self, farm0):
        ctx = cx.abstract(farm0)
        assert isinstance(cx.typecheck(ctx, it.Select("hoe")), cx.Ok)
        verdict = cx.typecheck(ctx, it.Select("rock_3"))
        assert isinstance(verdict, cx.IllTyped)

    def test_farm_apply_requires_selection_and_rule(self, farm0):
        ctx = cx.abstract(farm0)
        verdict = cx.typecheck(ctx, it.Apply("plot_1"))
        assert isinstance(verdict, cx.IllTyped)  # nothing selected
        g1 = il.step(farm0, it.Select("hoe")).next
        assert isinstance(cx.typecheck(cx.abstract(g1), it.Apply("plot_1")),
                          cx.Ok)
        # hoe on a rock has no rule
        verdict = cx.typecheck(cx.abstract(g1), it.Apply("rock_3"))
        assert isinstance(verdict, cx.IllTyped)


class TestContextSuccession:
    def test_take_preserves_statics(self, g0):
        g1 = il.step(g0, it.Take("flask")).next
        assert cx.context_succeeds(cx.abstract(g0), cx.abstract(g1))

    def test_missing_static_fact_fails(self, g0):
        ctx = cx.abstract(g0)
        smaller = cx.Context(
            static=frozenset(list(ctx.static)[1:]),
            fluents=ctx.fluents,
            world=ctx.world,
        )
        assert not cx.context_succeeds(ctx, smaller)

    def test_reflexive(self, g0):
        ctx = cx.abstract(g0)
        assert cx.context_succeeds(ctx, ctx)

    def test_invariant_violations_rejected(self, g0):
        ctx = cx.abstract(g0)
        no_player = cx.Context(
            static=ctx.static,
            fluents=frozenset(f for f in ctx.fluents
                              if not isinstance(f, PlayerIn)),
            world=ctx.world,
        )
        assert not cx.context_succeeds(ctx, no_player)


class TestProgress:
    def test_move_take_world_exhaustive(self, g0):
        report = cx.check_progress(g0)
        assert report.states == 16
        assert report.violations == []
        assert not report.truncated
        assert report.pairs > 0

    def test_farm_world_bounded(self, farm0):
        report = cx.check_progress(farm0, max_states=120, max_day=30)
        assert report.violations == []
        assert report.truncated

    def test_report_json_schema(self, g0):
        blob = json.loads(cx.check_progress(g0).to_json())
        assert set(blob) == {"states", "pairs", "violations", "truncated"}

    def test_broken_rule_is_reported(self, g0, monkeypatch):
        # negative control: drop the at-premise from the take rule
        monkeypatch.setitem(cx.TYPING_RULES, it.Take,
                            lambda ctx, i: cx.Ok())
        report = cx.check_progress(g0)
        assert report.violations
        sample = report.violations[0]
        assert set(sample) == {"state", "intent", "kind"}

    def test_well_typed_implies_success(self, g0):
        for state in _all_16(g0):
            ctx = cx.abstract(state)
            for intent in candidate_intents(state):
                if isinstance(cx.typecheck(ctx, intent), cx.Ok):
                    assert il.step(state, intent).resp.verdict == "success"

    def test_ill_typed_take_implies_failure(self, g0):
        for state in _all_16(g0):
            ctx = cx.abstract(state)
            for name in state.entities:
                intent = it.Take(name)
                if isinstance(cx.typecheck(ctx, intent), cx.IllTyped):
                    assert il.step(state, intent).resp.verdict == "failure"


def _all_16(g0):
    for room in g0.world.rooms:
        for flask_loc in ("lab", "inventory"):
            for book_loc in ("library", "inventory"):
                yield g0.replace(
                    player_room=room,
                    locations={"flask": flask_loc, "book": book_loc},
                )

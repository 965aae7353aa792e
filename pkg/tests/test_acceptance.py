"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Tolerances are pinned here, not configurable."""

import copy
import math
import random
import time

import intentlang as il
from intentlang import contexts as cx
from intentlang import farm
from intentlang import intents as it
from intentlang import traces
from intentlang.intents import candidate_intents
from intentlang.skills import run_skill, typecheck_skill
from intentlang.skills.ast import Failed, Produced


def _report(name, ok):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def test_paper_trace_reproduction(g0):
    t0 = time.perf_counter()
    state = g0
    verdicts = []
    for command in ("go north", "take flask", "go south"):
        intent = il.parse_command_line(command)
        result = il.step(state, intent)
        verdicts.append(result.resp.verdict)
        state = result.next
    elapsed = time.perf_counter() - t0
    ok = verdicts == ["failure", "success", "success"] and elapsed < 0.1
    _report(f"paper trace reproduction ({elapsed * 1000:.1f} ms)", ok)


def test_totality_completeness(g0):
    t0 = time.perf_counter()
    report = il.check_totality(g0)
    elapsed = time.perf_counter() - t0
    ok = (report.states == 16 and report.undefined == []
          and not report.truncated and elapsed < 1.0)
    _report(
        f"totality: {report.states} states, {report.pairs} pairs, "
        f"{len(report.undefined)} undefined ({elapsed * 1000:.0f} ms)", ok)


def test_progress(g0):
    t0 = time.perf_counter()
    report = cx.check_progress(g0)
    elapsed = time.perf_counter() - t0
    ok = (report.states == 16 and report.violations == []
          and not report.truncated and elapsed < 1.0)
    _report(
        f"progress: {report.pairs} well-typed pairs, "
        f"{len(report.violations)} violations ({elapsed * 1000:.0f} ms)", ok)


def test_enumeration_typing_equivalence(g0):
    checked = 0
    ok = True
    for room in g0.world.rooms:
        for flask_loc in ("lab", "inventory"):
            for book_loc in ("library", "inventory"):
                state = g0.replace(
                    player_room=room,
                    locations={"flask": flask_loc, "book": book_loc})
                ctx = cx.abstract(state)
                enumerated = {c.intent for c in il.enumerate_choices(state)}
                well_typed = {
                    i for i in candidate_intents(state)
                    if isinstance(cx.typecheck(ctx, i), cx.Ok)}
                ok = ok and enumerated == well_typed
                checked += 1
    _report(f"enumeration/typing equivalence over {checked} states", ok)


def test_skill_execution(farm0, library_defs, oneliner_defs):
    ok = typecheck_skill(library_defs, farm0.world) == []
    ok = ok and typecheck_skill(oneliner_defs, farm0.world) == []
    for name in ("till", "plant", "mine", "talk", "enter_shop"):
        _, outcome, _ = run_skill(farm0, oneliner_defs, name, {})
        ok = ok and isinstance(outcome, Produced)
    _, outcome, _ = run_skill(farm0, library_defs, "mine",
                              {"p": "pickaxe", "r": "rock_3"})
    ok = ok and isinstance(outcome, Produced)

    seeded = farm0.replace(rng_seed=42)
    assert seeded.world.farm_rules.growth_days["parsnip"] == 4
    final, outcome, trace = run_skill(
        seeded, library_defs, "grow_crop",
        {"s": "plot_1", "w": "can_1"}, type_args={"t": "parsnip"})
    waits = sum(1 for e in trace.entries if isinstance(e.intent, it.Wait))
    produced = isinstance(outcome, Produced) and \
        str(outcome.bindings["result"][0]) == "crop(parsnip)"
    ok = ok and produced and waits == 4
    _report(
        f"skill execution: grow_crop[parsnip] -> crop after {waits} waits", ok)


def test_failure_threading(farm_doc, oneliner_defs):
    doc = copy.deepcopy(farm_doc)
    doc["entities"] = [e for e in doc["entities"]
                       if not e["name"].startswith("rock")]
    state = il.load_world(doc)
    final, outcome, _ = run_skill(state, oneliner_defs, "mine", {})
    pre_failure = il.step(state, it.Select("pickaxe")).next
    ok = (isinstance(outcome, Failed)
          and outcome.at.startswith("move_near")
          and il.state_digest(final) == il.state_digest(pre_failure))
    _report(f"failure threading: {outcome.at} ({outcome.reason})", ok)


def test_par_commutativity(farm_doc, library_defs):
    ok = True
    for seed in range(100):
        doc = copy.deepcopy(farm_doc)
        doc["seed"] = seed
        for n in range(seed % 3):
            doc["entities"].append({
                "name": f"parsnip_seeds_{n + 2}", "kind": "item",
                "room": "farmhouse"})
        base = il.load_world(doc)
        args = {"s": "plot_1", "w": "can_1"}
        left, _, _ = run_skill(base, library_defs, "grow_crop", args,
                               type_args={"t": "parsnip"})
        right, _, _ = run_skill(base, library_defs, "grow_crop", args,
                                type_args={"t": "parsnip"},
                                par_right_first=True)
        ok = ok and il.state_digest(left) == il.state_digest(right)
    _report("par commutativity across 100 seeded configurations", ok)


def test_replay_determinism(move_take_doc, farm_doc):
    ok = True
    fish_logs = []
    total = 0
    for doc_base, length in ((move_take_doc, 12), (farm_doc, 20)):
        for session in range(500):
            doc = copy.deepcopy(doc_base)
            doc["seed"] = session
            base = il.load_world(doc)
            rng = random.Random(session * 7919 + 1)
            state = base
            trace = traces.new_trace(base)
            catches = []
            for _ in range(length):
                intent = rng.choice(candidate_intents(state))
                result = il.safe_step(state, intent)
                trace = traces.record(trace, intent, result)
                state = result.next
                catches += [str(t) for t, _ in result.resp.payload
                            if str(t) in ("fish", "trash")]
            ok = ok and traces.replay(base, trace).exact
            fish_logs.append(tuple(catches))
            total += 1
    # fishing byte-identity: replaying the catching sessions reproduces
    # the same fish/trash sequences (digests already guarantee it; check
    # the payload stream explicitly on a dedicated lakeside session)
    base = il.load_world(farm_doc)

    def lakeside_catches(seed):
        state = base.replace(rng_seed=seed)
        log = []
        for intent in [it.Select("rod_1"), it.MoveNear("water_1")] + \
                [it.Apply("water_1")] * 30:
            result = il.safe_step(state, intent)
            state = result.next
            log += [str(t) for t, _ in result.resp.payload
                    if str(t) in ("fish", "trash")]
        return "".join("F" if c == "fish" else "T" for c in log)

    for seed in range(20):
        ok = ok and lakeside_catches(seed) == lakeside_catches(seed)
    _report(f"replay determinism over {total} random sessions", ok)


def test_fishing_statistics(farm_doc):
    doc = copy.deepcopy(farm_doc)
    base = il.load_world(doc)
    state = base.replace(player_room="lake", selected="rod_1")
    probe = state
    fish = 0
    draws = 10_000
    for _ in range(draws):
        result = farm.try_fish(probe)
        if str(result.resp.payload[0][0]) == "fish":
            fish += 1
        probe = state.replace(rng_counter=result.next.rng_counter)
    bound = 4 * math.sqrt(draws * 0.5 * 0.5)
    assert bound == 200.0
    ok = abs(fish - draws / 2) <= bound
    _report(f"fishing statistics: {fish}/{draws} fish (|delta| <= {bound:.0f})",
            ok)

"""Strategy forest: registration, scheduling, rules, definition files."""

import itertools
import json
import random

import pytest

from scriptmorph.strategies import (
    EMPTY_RULES,
    FeNode,
    ForestError,
    PrecedenceRuleSet,
    Registry,
    ScheduleError,
    StrategyModule,
    fe_chain,
    load_modules,
    load_rules,
    plan_schedule,
    register_module,
    validate_schedule,
)

NODE = FeNode(original="echo 1;", transformed="echo 1; // x", description="adds a comment")


def module(mid, parent=None, destroys=False, chain=(NODE,)):
    return StrategyModule(
        id=mid,
        title=mid,
        parent=parent,
        fe_chain=tuple(chain),
        destroys_readability=destroys,
        key_prompts=(f"apply {mid}",),
    )


def registry_of(*modules_):
    reg = Registry()
    for m in modules_:
        reg.register(m)
    return reg


class TestRegistry:
    def test_register_minimal_root(self):
        reg = Registry()
        assert register_module(module("comment-insert"), reg) == "comment-insert"
        assert "comment-insert" in reg

    def test_dangling_parent_rejected(self):
        reg = Registry()
        with pytest.raises(ForestError):
            reg.register(module("x", parent="missing"))

    def test_duplicate_id_rejected(self):
        reg = registry_of(module("a"))
        with pytest.raises(ForestError):
            reg.register(module("a"))

    def test_empty_chain_rejected(self):
        reg = Registry()
        with pytest.raises(ForestError):
            reg.register(module("a", chain=()))

    def test_three_level_chain_depth(self):
        reg = registry_of(module("root"), module("child", parent="root"), module("grand", parent="child"))
        assert reg.depth("grand") == 3
        assert reg.depth("root") == 1

    def test_example_fields_validated(self):
        with pytest.raises(ForestError):
            FeNode(original="same", transformed="same", description="d")
        with pytest.raises(ForestError):
            FeNode(original="", transformed="x", description="d")

    def test_parent_chains_terminate(self, registry):
        for mid in registry.ids():
            assert 1 <= registry.depth(mid) <= len(registry)


class TestValidateSchedule:
    def test_no_rules_no_violations(self):
        reg = registry_of(module("comment-insert"), module("string-split"))
        report = validate_schedule(["comment-insert", "string-split"], EMPTY_RULES, reg)
        assert report.ok
        assert report.violations == ()

    def test_readability_violation_positions(self):
        reg = registry_of(module("xor-like-encode", destroys=True), module("symbol-noise"))
        report = validate_schedule(["xor-like-encode", "symbol-noise"], EMPTY_RULES, reg)
        assert not report.ok
        v = report.violations[0]
        assert v.kind == "readability"
        assert (v.first_pos, v.second_pos) == (0, 1)

    def test_readability_overridden_by_explicit_rule(self):
        reg = registry_of(module("enc", destroys=True), module("noise"))
        rules = PrecedenceRuleSet(must_precede=frozenset({("enc", "noise")}))
        assert validate_schedule(["enc", "noise"], rules, reg).ok

    def test_exact_violation_count_vs_bruteforce(self):
        reg = registry_of(*(module(m) for m in "abcd"))
        rules = PrecedenceRuleSet(
            must_precede=frozenset({("a", "b"), ("c", "d")}),
            forbidden_before=frozenset({("b", "d")}),
        )
        schedule = ["b", "a", "c", "d"]  # violates (a,b) and (b,d)
        report = validate_schedule(schedule, rules, reg)
        assert len(report.violations) == 2

        def brute_force(schedule, rules):
            pos = {m: i for i, m in enumerate(schedule)}
            count = 0
            for a, b in rules.must_precede:
                if a in pos and b in pos and pos[a] > pos[b]:
                    count += 1
            for a, b in rules.forbidden_before:
                if a in pos and b in pos and pos[a] < pos[b]:
                    count += 1
            return count

        assert brute_force(schedule, rules) == 2

    def test_unknown_id_raises(self):
        reg = registry_of(module("a"))
        with pytest.raises(ScheduleError):
            validate_schedule(["a", "ghost"], EMPTY_RULES, reg)

    def test_pair_in_both_relations_rejected(self):
        with pytest.raises(ForestError):
            PrecedenceRuleSet(
                must_precede=frozenset({("a", "b")}),
                forbidden_before=frozenset({("a", "b")}),
            )


class TestPlanSchedule:
    def test_singleton(self):
        reg = registry_of(module("a"))
        assert plan_schedule({"a"}, EMPTY_RULES, reg) == ["a"]

    def test_single_rule_forces_order(self):
        reg = registry_of(module("a"), module("b"))
        rules = PrecedenceRuleSet(must_precede=frozenset({("b", "a")}))
        assert plan_schedule({"a", "b"}, rules, reg) == ["b", "a"]

    def test_unique_order_matches_permutation_oracle(self):
        ids = ["m1", "m2", "m3", "m4", "m5"]
        reg = registry_of(*(module(m) for m in ids))
        rules = PrecedenceRuleSet(
            must_precede=frozenset(
                {("m5", "m4"), ("m4", "m3"), ("m3", "m2"), ("m2", "m1")}
            )
        )
        valid = [
            list(perm)
            for perm in itertools.permutations(ids)
            if validate_schedule(list(perm), rules, reg).ok
        ]
        assert len(valid) == 1
        assert plan_schedule(set(ids), rules, reg) == valid[0]

    def test_cycle_reported(self):
        reg = registry_of(module("a"), module("b"))
        rules = PrecedenceRuleSet(must_precede=frozenset({("a", "b"), ("b", "a")}))
        with pytest.raises(ScheduleError) as err:
            plan_schedule({"a", "b"}, rules, reg)
        assert set(err.value.cycle) >= {"a", "b"}

    def test_empty_selection_rejected(self):
        with pytest.raises(ScheduleError):
            plan_schedule(set(), EMPTY_RULES, Registry())

    def test_planned_schedules_always_validate(self):
        rng = random.Random(4100)
        ids = ["a", "b", "c", "d", "e", "f"]
        reg = registry_of(*(module(m) for m in ids))
        for _ in range(100):
            chosen = set(rng.sample(ids, rng.randrange(1, len(ids) + 1)))
            ordered = sorted(chosen)
            rng.shuffle(ordered)
            # rules drawn consistent with a hidden order are always satisfiable
            must = set()
            forbid = set()
            for i in range(len(ordered)):
                for j in range(i + 1, len(ordered)):
                    roll = rng.random()
                    if roll < 0.25:
                        must.add((ordered[i], ordered[j]))
                    elif roll < 0.35:
                        forbid.add((ordered[j], ordered[i]))
            rules = PrecedenceRuleSet(
                must_precede=frozenset(must), forbidden_before=frozenset(forbid)
            )
            schedule = plan_schedule(chosen, rules, reg)
            assert sorted(schedule) == sorted(chosen)
            assert validate_schedule(schedule, rules, reg).ok

    def test_determinism(self):
        reg = registry_of(*(module(m) for m in "abcde"))
        rules = PrecedenceRuleSet(must_precede=frozenset({("c", "a")}))
        first = plan_schedule(set("abcde"), rules, reg, seed=1)
        again = plan_schedule(set("abcde"), rules, reg, seed=1)
        assert first == again

    def test_readability_module_sinks_to_the_end(self):
        reg = registry_of(module("enc", destroys=True), module("a"), module("b"))
        schedule = plan_schedule({"enc", "a", "b"}, EMPTY_RULES, reg)
        assert schedule[-1] == "enc"
        assert validate_schedule(schedule, EMPTY_RULES, reg).ok


class TestFeChain:
    def test_stored_order(self):
        first = FeNode(original="a;", transformed="b;", description="one")
        second = FeNode(original="c;", transformed="d;", description="two")
        reg = registry_of(module("m", chain=(first, second)))
        assert fe_chain("m", reg) == (first, second)

    def test_unknown_id(self):
        with pytest.raises(ForestError):
            fe_chain("ghost", Registry())

    def test_file_roundtrip_byte_exact(self, tmp_path):
        doc = {
            "id": "m",
            "title": "M",
            "parent": None,
            "pre_knowledge": None,
            "destroys_readability": False,
            "key_prompts": ["one"],
            "fe_chain": [
                {"original": "echo 1;", "transformed": "echo 1; // a", "description": "c1"},
                {"original": "echo 2;", "transformed": "echo 2; // b", "description": "c2"},
                {"original": "echo 3;", "transformed": "echo 3; // c", "description": "c3"},
            ],
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        reg = load_modules(tmp_path)
        chain = fe_chain("m", reg)
        # independent reader: plain json against the dataclasses
        raw = json.loads(path.read_text(encoding="utf-8"))["fe_chain"]
        assert len(chain) == 3
        for node, expected in zip(chain, raw):
            assert node.original == expected["original"]
            assert node.transformed == expected["transformed"]
            assert node.description == expected["description"]


class TestDefinitionFiles:
    def test_bundled_forest_loads(self, registry):
        assert len(registry) == 12
        assert registry.depth("comment-banner") == 3
        assert registry.get("xor-like-encode").destroys_readability

    def test_unknown_field_rejected(self, tmp_path):
        doc = {
            "id": "m",
            "title": "M",
            "parent": None,
            "pre_knowledge": None,
            "destroys_readability": False,
            "key_prompts": [],
            "fe_chain": [{"original": "a;", "transformed": "b;", "description": "d"}],
            "surprise": 1,
        }
        (tmp_path / "m.json").write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ForestError):
            load_modules(tmp_path)

    def test_children_load_before_parents(self, tmp_path, registry):
        # write child lexicographically before parent to prove ordering
        child = {
            "id": "aa-child",
            "title": "c",
            "parent": "zz-root",
            "pre_knowledge": None,
            "destroys_readability": False,
            "key_prompts": [],
            "fe_chain": [{"original": "a;", "transformed": "b;", "description": "d"}],
        }
        root = dict(child, id="zz-root", parent=None)
        (tmp_path / "a.json").write_text(json.dumps(child), encoding="utf-8")
        (tmp_path / "z.json").write_text(json.dumps(root), encoding="utf-8")
        reg = load_modules(tmp_path)
        assert reg.depth("aa-child") == 2

    def test_rules_file(self, tmp_path, registry):
        path = tmp_path / "rules.json"
        path.write_text(
            json.dumps(
                {
                    "must_precede": [["comment-insert", "comment-noise"]],
                    "forbidden_before": [["rev-wrap", "rename-vars"]],
                }
            ),
            encoding="utf-8",
        )
        rules = load_rules(path)
        rules.check_ids(registry)
        assert ("comment-insert", "comment-noise") in rules.must_precede

    def test_rules_with_unknown_ids_rejected(self, tmp_path, registry):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps({"must_precede": [["ghost", "rename-vars"]]}), encoding="utf-8")
        rules = load_rules(path)
        with pytest.raises(ForestError):
            rules.check_ids(registry)

    def test_bundled_precedence_rules_consistent(self, registry, precedence_rules):
        precedence_rules.check_ids(registry)

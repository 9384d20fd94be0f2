"""Strategy forest: hierarchical rewrite modules, worked-example chains and
scheduling rules.

A module bundles one rewrite idea: optional background text, an ordered
chain of before/after examples teaching it, extra instruction lines, and a
flag marking rewrites whose output is no longer text-readable.  Modules
form a forest through parent links.  Scheduling is constrained by explicit
precedence rules plus a blanket default that nothing may run after a
readability-destroying module unless a rule sanctions that exact pair.

Modules and rules are data, loaded from JSON definition files (one module
per file), so new rewrite ideas can be added without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import ScriptMorphError


class ForestError(ScriptMorphError):
    """Invalid module definition or registry misuse."""


class ScheduleError(ScriptMorphError):
    """A schedule cannot be produced or contains unknown ids."""

    def __init__(self, message, cycle=()):
        self.cycle = tuple(cycle)
        super().__init__(message)


@dataclass(frozen=True)
class FeNode:
    """One worked example: source before, source after, and a short note."""

    original: str
    transformed: str
    description: str

    def __post_init__(self):
        if not self.original or not self.transformed or not self.description:
            raise ForestError("example fields must all be non-empty")
        if self.original == self.transformed:
            raise ForestError("example must actually change the source")


@dataclass(frozen=True)
class StrategyModule:
    id: str
    title: str
    fe_chain: tuple[FeNode, ...]
    parent: Optional[str] = None
    pre_knowledge: Optional[str] = None
    destroys_readability: bool = False
    key_prompts: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ForestError("module id must be non-empty")


@dataclass(frozen=True)
class PrecedenceRuleSet:
    """Ordered-pair constraints over module ids.

    ``must_precede`` pairs (a, b): a comes before b when both are scheduled.
    ``forbidden_before`` pairs (a, b): a must not come before b.
    """

    must_precede: frozenset[tuple[str, str]] = frozenset()
    forbidden_before: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        overlap = self.must_precede & self.forbidden_before
        if overlap:
            raise ForestError(f"pairs in both relations: {sorted(overlap)}")

    def check_ids(self, registry: "Registry"):
        for a, b in sorted(self.must_precede | self.forbidden_before):
            for mid in (a, b):
                if mid not in registry:
                    raise ForestError(f"rule references unknown module {mid!r}")


EMPTY_RULES = PrecedenceRuleSet()


@dataclass(frozen=True)
class ScheduleViolation:
    kind: str  # must_precede | forbidden_before | readability
    first_id: str
    second_id: str
    first_pos: int
    second_pos: int

    def describe(self) -> str:
        return (
            f"{self.kind}: {self.first_id}@{self.first_pos} vs "
            f"{self.second_id}@{self.second_pos}"
        )


@dataclass(frozen=True)
class ScheduleReport:
    ok: bool
    violations: tuple[ScheduleViolation, ...]


class Registry:
    """Holds the forest.  Mutable only through register(); load once, then
    share freely across readers."""

    def __init__(self):
        self._modules: dict[str, StrategyModule] = {}

    def __contains__(self, module_id: str) -> bool:
        return module_id in self._modules

    def __len__(self) -> int:
        return len(self._modules)

    def ids(self) -> list[str]:
        return sorted(self._modules)

    def get(self, module_id: str) -> StrategyModule:
        try:
            return self._modules[module_id]
        except KeyError:
            raise ForestError(f"unknown module {module_id!r}") from None

    def register(self, module: StrategyModule) -> str:
        if module.id in self._modules:
            raise ForestError(f"duplicate module id {module.id!r}")
        if module.parent is not None and module.parent not in self._modules:
            raise ForestError(
                f"module {module.id!r} names unregistered parent {module.parent!r}"
            )
        if not module.fe_chain:
            raise ForestError(f"module {module.id!r} has an empty example chain")
        self._modules[module.id] = module
        return module.id

    def depth(self, module_id: str) -> int:
        """1 for a root, parent depth + 1 otherwise."""
        node = self.get(module_id)
        depth = 1
        while node.parent is not None:
            node = self.get(node.parent)
            depth += 1
            if depth > len(self._modules):
                raise ForestError("parent chain does not terminate")
        return depth

    def roots(self) -> list[str]:
        return sorted(m.id for m in self._modules.values() if m.parent is None)


def register_module(module: StrategyModule, registry: Registry) -> str:
    return registry.register(module)


def fe_chain(module_id: str, registry: Registry) -> tuple[FeNode, ...]:
    return registry.get(module_id).fe_chain


def validate_schedule(
    schedule: list[str], rules: PrecedenceRuleSet, registry: Registry
) -> ScheduleReport:
    """Report every violated rule pair, with positions.

    Beyond the explicit rules, any module placed after a
    readability-destroying one is a violation unless the rule set contains
    must_precede(destroyer, follower), which declares the follower tolerant
    of unreadable input.
    """
    for mid in schedule:
        if mid not in registry:
            raise ScheduleError(f"unknown module in schedule: {mid!r}")
    pos = {mid: i for i, mid in enumerate(schedule)}
    if len(pos) != len(schedule):
        raise ScheduleError("schedule contains repeated module ids")
    violations = []
    for a, b in sorted(rules.must_precede):
        if a in pos and b in pos and pos[a] > pos[b]:
            violations.append(
                ScheduleViolation("must_precede", a, b, pos[a], pos[b])
            )
    for a, b in sorted(rules.forbidden_before):
        if a in pos and b in pos and pos[a] < pos[b]:
            violations.append(
                ScheduleViolation("forbidden_before", a, b, pos[a], pos[b])
            )
    for i, mid in enumerate(schedule):
        if not registry.get(mid).destroys_readability:
            continue
        for j in range(i + 1, len(schedule)):
            follower = schedule[j]
            if (mid, follower) in rules.must_precede:
                continue
            violations.append(
                ScheduleViolation("readability", mid, follower, i, j)
            )
    return ScheduleReport(ok=not violations, violations=tuple(violations))


def plan_schedule(
    selected: Iterable[str],
    rules: PrecedenceRuleSet,
    registry: Registry,
    seed: int = 0,
) -> list[str]:
    """Order the selected modules so that validate_schedule passes.

    Deterministic: a topological sort of the constraint graph with ties
    broken lexicographically by id (the seed does not influence ordering;
    it is accepted so campaign call sites can pass their one seed through).
    Raises ScheduleError naming an offending cycle when the rules cannot be
    satisfied.
    """
    del seed
    chosen = sorted(set(selected))
    if not chosen:
        raise ScheduleError("no modules selected")
    for mid in chosen:
        registry.get(mid)

    after: dict[str, set[str]] = {mid: set() for mid in chosen}

    def order(first: str, then: str):
        if first != then:
            after[then].add(first)

    for a, b in rules.must_precede:
        if a in after and b in after:
            order(a, b)
    for a, b in rules.forbidden_before:
        if a in after and b in after:
            order(b, a)
    for mid in chosen:
        if registry.get(mid).destroys_readability:
            for other in chosen:
                if other != mid and (mid, other) not in rules.must_precede:
                    order(other, mid)

    schedule = []
    pending = dict(after)
    placed: set[str] = set()
    while pending:
        ready = sorted(m for m, deps in pending.items() if deps <= placed)
        if not ready:
            cycle = _find_cycle(pending, placed)
            raise ScheduleError(
                "rules are unsatisfiable, cycle: " + " -> ".join(cycle), cycle=cycle
            )
        head = ready[0]
        schedule.append(head)
        placed.add(head)
        del pending[head]
    return schedule


def _find_cycle(pending: dict[str, set[str]], placed: set[str]) -> list[str]:
    graph = {m: sorted(d - placed) for m, d in pending.items()}
    start = sorted(graph)[0]
    seen: list[str] = []
    node = start
    while node not in seen:
        seen.append(node)
        node = graph[node][0]
    at = seen.index(node)
    return seen[at:] + [node]


# --- definition files ---------------------------------------------------

_MODULE_FIELDS = {
    "id",
    "title",
    "parent",
    "pre_knowledge",
    "destroys_readability",
    "key_prompts",
    "fe_chain",
}


def module_from_dict(doc: dict) -> StrategyModule:
    unknown = set(doc) - _MODULE_FIELDS
    if unknown:
        raise ForestError(f"unknown module fields: {sorted(unknown)}")
    missing = _MODULE_FIELDS - set(doc)
    if missing:
        raise ForestError(f"missing module fields: {sorted(missing)}")
    chain = tuple(
        FeNode(
            original=node["original"],
            transformed=node["transformed"],
            description=node["description"],
        )
        for node in doc["fe_chain"]
    )
    return StrategyModule(
        id=doc["id"],
        title=doc["title"],
        parent=doc["parent"],
        pre_knowledge=doc["pre_knowledge"],
        destroys_readability=bool(doc["destroys_readability"]),
        key_prompts=tuple(doc["key_prompts"]),
        fe_chain=chain,
    )


def load_modules(modules_dir: Path) -> Registry:
    """Load every *.json module definition under ``modules_dir``.

    Files are registered parents-first regardless of directory order.
    """
    modules_dir = Path(modules_dir)
    defs = []
    for path in sorted(modules_dir.glob("*.json")):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ForestError(f"{path}: invalid JSON ({exc})") from exc
        defs.append(module_from_dict(doc))
    registry = Registry()
    remaining = {m.id: m for m in defs}
    while remaining:
        ready = sorted(
            mid
            for mid, m in remaining.items()
            if m.parent is None or m.parent in registry
        )
        if not ready:
            raise ForestError(
                f"unresolvable parent links among: {sorted(remaining)}"
            )
        for mid in ready:
            registry.register(remaining.pop(mid))
    return registry


def load_rules(path: Path) -> PrecedenceRuleSet:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    unknown = set(doc) - {"must_precede", "forbidden_before"}
    if unknown:
        raise ForestError(f"unknown rule fields: {sorted(unknown)}")
    return PrecedenceRuleSet(
        must_precede=frozenset(tuple(p) for p in doc.get("must_precede", ())),
        forbidden_before=frozenset(
            tuple(p) for p in doc.get("forbidden_before", ())
        ),
    )

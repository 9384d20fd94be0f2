"""Acceptance suite: one test per criterion, pinned tolerances, timed.

Every criterion runs offline against the deterministic mock provider and
prints its own pass line (visible with ``pytest -s`` or in the captured
output of a failing run).
"""

import json
import random
import time

from helpers import audit_memory_scope, independent_rename, two_layer_paths
from test_dedup import build_known_corpus
from scriptmorph.dedup import dedup, opcode_hash
from scriptmorph.gateway import MockProvider
from scriptmorph.harness import (
    BENIGN,
    MALICIOUS,
    ConfusionMatrix,
    Detector,
    ScanPolicy,
    classifier_metrics,
    compute_metrics,
    scan,
    signature_detector,
    survival_check,
)
from scriptmorph.harness.metrics import SurvivalResult
from scriptmorph.prompts import budget_large, budget_small
from scriptmorph.search import SearchOrchestrator, SearchParams
from scriptmorph.seeding import derive_seed

TREND_SCHEDULE = [
    "comment-insert",
    "string-split",
    "symbol-noise",
    "dead-store",
    "echo-split",
    "int-unfold",
    "rename-vars",
    "var-chain",
    "rev-wrap",
    "comment-noise",
]


def report(line):
    print(f"ACCEPTANCE PASS: {line}")


class StaticDetector(Detector):
    def __init__(self, detector_id, verdict, weight=1):
        self.detector_id = detector_id
        self.verdict = verdict
        self.weight = weight

    def scan(self, text):
        return self.verdict


class RoundFlipDetector(Detector):
    """Flips to the opposite verdict in exactly one round."""

    def __init__(self, detector_id, steady, flip_round, weight=1):
        self.detector_id = detector_id
        self.steady = steady
        self.flip_round = flip_round
        self.weight = weight
        self._round = -1

    def scan(self, text):
        self._round += 1
        if self._round == self.flip_round:
            return MALICIOUS if self.steady == BENIGN else BENIGN
        return self.steady


def test_formula_oracles():
    """compute_metrics, classifier_metrics and both budget formulas against
    brute-force recomputation; 1,000 random inputs each, ER=1-DR exact,
    ratios within 1e-9, budgets exact; under 5 s."""
    started = time.monotonic()
    rng = random.Random(20_001)

    for _ in range(1000):
        n = rng.randrange(1, 12)
        detected_flags = [rng.random() < 0.5 for _ in range(n)]
        outcomes = [
            scan(
                f"s{i}",
                "text",
                [StaticDetector("d0", MALICIOUS if flag else BENIGN)],
                ScanPolicy(threshold=1, rounds=1),
            )
            for i, flag in enumerate(detected_flags)
        ]
        survivals = [SurvivalResult(rng.random() < 0.5) for _ in range(n)]
        sizes = [(rng.randrange(1, 500), rng.randrange(1, 500)) for _ in range(n)]
        got = compute_metrics(outcomes, survivals, sizes)
        # brute-force recount from the raw inputs
        detected = sum(detected_flags)
        assert got.er == 1.0 - got.dr  # exact, not a tolerance
        assert abs(got.dr - detected / n) < 1e-9
        assert abs(got.sr - sum(1 for s in survivals if s.survived) / n) < 1e-9
        assert abs(got.mr - sum(t for _, t in sizes) / sum(o for o, _ in sizes)) < 1e-9

    for _ in range(1000):
        pairs = [
            (rng.random() < 0.5, rng.random() < 0.5)
            for _ in range(rng.randrange(1, 60))
        ]
        cm = ConfusionMatrix(
            tp=sum(1 for t, p in pairs if t and p),
            fp=sum(1 for t, p in pairs if not t and p),
            tn=sum(1 for t, p in pairs if not t and not p),
            fn=sum(1 for t, p in pairs if t and not p),
        )
        got = classifier_metrics(cm)
        # oracle: recount directly from the labelled pairs
        correct = sum(1 for t, p in pairs if t == p)
        assert abs(got.acc - correct / len(pairs)) < 1e-9
        pred_pos = [t for t, p in pairs if p]
        true_pos = [p for t, p in pairs if t]
        if pred_pos:
            assert abs(got.pre - sum(pred_pos) / len(pred_pos)) < 1e-9
        else:
            assert got.pre is None
        if true_pos:
            assert abs(got.rec - sum(true_pos) / len(true_pos)) < 1e-9
        else:
            assert got.rec is None
        if got.pre and got.rec:
            assert abs(got.f1 - 2 * got.pre * got.rec / (got.pre + got.rec)) < 1e-9

    for _ in range(1000):
        max_token = rng.randrange(32, 30_000)
        input_tokens = rng.randrange(0, max_token - 1)
        p = rng.randrange(1, 10)
        assert budget_small(max_token, input_tokens, p) == (max_token - input_tokens) // p
        desc = rng.randrange(0, max_token - input_tokens - 1) if max_token - input_tokens > 1 else 0
        assert budget_large(max_token, input_tokens, desc) == max_token - input_tokens - desc

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"formula oracles took {elapsed:.1f}s"
    report(f"formula oracles (3x1000 random inputs, {elapsed:.1f}s)")


def test_search_oracle_two_layers(registry, tmp_path):
    """Depth-2, p=2, beam 1: the campaign winner equals exhaustive
    enumeration of all four leaf paths under the vote heuristic, across 25
    seeded fixtures; under 10 s."""
    started = time.monotonic()
    schedule = ["comment-insert", "string-split"]
    from scriptmorph.config import resolve_path

    corpus = sorted((resolve_path("pkg:") / "corpus").iterdir())
    checked = 0
    for i in range(25):
        source = corpus[i % len(corpus)].read_text(encoding="utf-8")
        seed = derive_seed("alg-oracle", i)
        orch = SearchOrchestrator(
            registry,
            MockProvider(),
            tmp_path / f"oracle-{i}",
            SearchParams(p=2, beam_width=1, seed=seed),
        )
        result = orch.run(source, schedule)
        layer1, leaves, expected_winner = two_layer_paths(
            source, schedule, registry, seed, 2
        )
        assert result.winners[0].code == expected_winner
        tree = json.loads((result.directory / "tree.json").read_text())
        assert [c["code"] for c in tree["candidates"] if c["layer"] == 1] == layer1
        checked += 1
    elapsed = time.monotonic() - started
    assert checked == 25
    assert elapsed < 10.0, f"search oracle took {elapsed:.1f}s"
    report(f"two-layer search oracle (25 seeded fixtures, {elapsed:.1f}s)")


def test_memory_scope_depth_ten(registry, tmp_path):
    """A depth-10 mock campaign embeds no candidate code from layers
    before n-1 in any layer-n request: zero violations."""
    source = (
        '$cmd = "run";\n$text = "hello secret_token operator";\n'
        'echo upper($text);\nif ($cmd == "run") {\n    echo " armed";\n}'
    )
    orch = SearchOrchestrator(
        registry,
        MockProvider(),
        tmp_path / "depth10",
        SearchParams(p=2, beam_width=1, seed=derive_seed("memory-scope")),
    )
    result = orch.run(source, TREND_SCHEDULE)
    assert result.status == "done"
    assert len(TREND_SCHEDULE) == 10
    violations = audit_memory_scope(result.directory)
    assert violations == []
    report("memory-scope audit (depth 10, 0 violations)")


def test_dedup_correctness(tmp_path):
    """30-file corpus with 11 known classes: 11 survivors, per-stage
    attribution, idempotence, order-insensitivity, and 200-renaming
    alpha-equivalence; under 5 s."""
    started = time.monotonic()
    expected = build_known_corpus(tmp_path / "in")
    first = dedup(tmp_path / "in", tmp_path / "out1")
    assert first.input_count == 30
    assert first.survivor_count == 11
    assert {s.stage: s.removed_count for s in first.stages} == expected

    again = dedup(tmp_path / "out1", tmp_path / "out2")
    assert all(s.removed_count == 0 for s in again.stages)

    files = sorted((tmp_path / "in").iterdir())
    rng = random.Random(4)
    shuffled = list(files)
    rng.shuffle(shuffled)
    reordered = dedup(tmp_path / "in", tmp_path / "out3", paths=shuffled)
    assert reordered.output_manifest == first.output_manifest
    assert [s.survivors for s in reordered.stages] == [s.survivors for s in first.stages]

    base = '$alpha = "pq";\n$beta = 4;\nif ($beta > 1) { echo $alpha, $beta; }\necho rev($alpha);'
    baseline = opcode_hash(base)
    rng = random.Random(5)
    for trial in range(200):
        mapping = {
            "alpha": f"r{trial}x{rng.randrange(100)}",
            "beta": f"s{trial}y{rng.randrange(100)}",
        }
        renamed = independent_rename(base, mapping)
        assert renamed != base
        assert opcode_hash(renamed) == baseline

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"dedup criterion took {elapsed:.1f}s"
    report(f"dedup correctness (11 classes + 200 renamings, {elapsed:.1f}s)")


def test_trend_reproduction(registry, signature_rules_path, corpus_dir, tmp_path):
    """Direction-only trend over the bundled corpus and rule set: ER
    non-decreasing in p ∈ {1,2,3}, ER(N=10) >= ER(N=5), and the SR gap
    between depths stays within 0.1; under 2 minutes."""
    started = time.monotonic()
    detector = signature_detector(signature_rules_path)
    policy = ScanPolicy(threshold=1, rounds=1)
    corpus = sorted(corpus_dir.iterdir())
    assert len(corpus) == 20

    def campaign_metrics(p, depth):
        outcomes, survivals, sizes = [], [], []
        for path in corpus:
            source = path.read_text(encoding="utf-8")
            seed = derive_seed(77, path.name)
            orch = SearchOrchestrator(
                registry,
                MockProvider(),
                tmp_path / f"trend-p{p}-n{depth}-{path.stem}",
                SearchParams(p=p, beam_width=1, seed=seed),
            )
            winner = orch.run(source, TREND_SCHEDULE[:depth], input_name=path.name).winners[0]
            outcomes.append(scan(path.name, winner.code, [detector], policy))
            survivals.append(survival_check(source, winner.code))
            sizes.append((len(source.encode()), len(winner.code.encode())))
        return compute_metrics(outcomes, survivals, sizes)

    by_p = {p: campaign_metrics(p, 10) for p in (1, 2, 3)}
    n5 = campaign_metrics(3, 5)

    assert by_p[1].er <= by_p[2].er <= by_p[3].er, (
        f"ER not monotone in p: {[by_p[p].er for p in (1, 2, 3)]}"
    )
    assert n5.er <= by_p[3].er, f"ER(N=10)={by_p[3].er} < ER(N=5)={n5.er}"
    assert abs(n5.sr - by_p[3].sr) <= 0.1, f"SR gap too wide: {n5.sr} vs {by_p[3].sr}"

    elapsed = time.monotonic() - started
    assert elapsed < 120.0, f"trend criterion took {elapsed:.1f}s"
    report(
        "trend reproduction (ER by p: "
        + ", ".join(f"{by_p[p].er:.2f}" for p in (1, 2, 3))
        + f"; ER N5/N10: {n5.er:.2f}/{by_p[3].er:.2f}; "
        + f"SR N5/N10: {n5.sr:.2f}/{by_p[3].sr:.2f}; {elapsed:.0f}s)"
    )


def test_campaign_determinism(registry, corpus_dir, tmp_path):
    """Two full mock campaigns with identical config and seed produce
    byte-identical winners/ and tree.json."""
    source = (corpus_dir / "s03.msl").read_text(encoding="utf-8")
    runs = []
    for name in ("det-a", "det-b"):
        orch = SearchOrchestrator(
            registry,
            MockProvider(),
            tmp_path / name,
            SearchParams(p=3, beam_width=2, seed=20_240_601, ballots=3),
        )
        runs.append(orch.run(source, TREND_SCHEDULE, input_name="s03.msl"))
    a, b = runs
    assert (a.directory / "tree.json").read_bytes() == (b.directory / "tree.json").read_bytes()
    wa = {p.name: p.read_bytes() for p in (a.directory / "winners").iterdir()}
    wb = {p.name: p.read_bytes() for p in (b.directory / "winners").iterdir()}
    assert wa == wb and wa
    report("campaign determinism (winners/ and tree.json byte-identical)")


def test_aggregation_policy():
    """58 unit-weight engines with threshold 13: exactly 13 positives label
    malicious, 12 label benign; 3-round consensus removes a single-round
    flip either way."""
    def cluster(positives, total=58):
        detectors = [StaticDetector(f"pos{i}", MALICIOUS) for i in range(positives)]
        detectors += [StaticDetector(f"neg{i}", BENIGN) for i in range(total - positives)]
        return detectors

    policy = ScanPolicy(threshold=13, rounds=3)
    assert len(cluster(13)) == 58
    assert scan("s", "t", cluster(13), policy).consensus == MALICIOUS
    assert scan("s", "t", cluster(12), policy).consensus == BENIGN

    # a benign-steady engine flipping positive in round 1 must not flip the
    # sample: 12 steady positives + 1 flapping engine stays benign
    flappy = cluster(12, total=57) + [RoundFlipDetector("flappy", BENIGN, flip_round=1)]
    outcome = scan("s", "t", flappy, policy)
    assert outcome.round_labels == [BENIGN, MALICIOUS, BENIGN]
    assert outcome.consensus == BENIGN

    # and a malicious-steady cluster with one engine dropping out for one
    # round stays malicious
    dropping = cluster(12, total=57) + [RoundFlipDetector("dropout", MALICIOUS, flip_round=1)]
    outcome = scan("s", "t", dropping, policy)
    assert outcome.round_labels == [MALICIOUS, BENIGN, MALICIOUS]
    assert outcome.consensus == MALICIOUS
    report("aggregation policy (58 engines, threshold 13, flip removal)")

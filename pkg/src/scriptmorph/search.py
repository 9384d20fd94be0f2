"""Layer-by-layer rewrite search with vote pruning and resumable state.

One campaign walks a validated module schedule: at layer n every frontier
member is expanded into p candidates through the gateway, the pooled
candidates are put to a model vote, and the top beam_width survive as the
next frontier.  The final layer's winners are the campaign output.

Contextual memory is deliberately narrow: a layer's prompts embed candidate
code from the previous layer only (the original input at layer 1), never
anything older.  State is checkpointed after every completed layer --
provider calls are the expensive, lossy step -- and a checkpoint carries
content hashes so resuming refuses tampered trees.

With beam_width=1 the search keeps a single winner per layer; with
beam_width=p it keeps the full sorted candidate set.  Both are exercised in
tests.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .errors import ScriptMorphError
from .gateway import EventLog, Gateway, Provider, RateLimiter, TransportError
from .prompts import (
    INPUT_PARENT,
    Mode,
    PromptParams,
    ReplyFormatError,
    SizeClass,
    ThoughtCandidate,
    build_chat_request,
    compose_generation_prompt,
    parse_generation_reply,
)
from .seeding import derive_seed
from .strategies import PrecedenceRuleSet, Registry, validate_schedule
from .voting import aggregate_votes, compose_vote_prompt, parse_vote_reply

logger = logging.getLogger(__name__)

CAMPAIGN_FILE = "campaign.json"
EVENTS_FILE = "events.jsonl"
TREE_FILE = "tree.json"
STATE_FILE = "state.json"
WINNERS_DIR = "winners"


class CampaignError(ScriptMorphError):
    pass


class CampaignIntegrityError(CampaignError):
    """Checkpoint or tree content does not match its recorded hash."""


class LayerFailedError(CampaignError):
    def __init__(self, layer: int, diagnostics: list[str]):
        self.layer = layer
        self.diagnostics = list(diagnostics)
        super().__init__(
            f"layer {layer} produced no usable candidates: {'; '.join(diagnostics)}"
        )


@dataclass(frozen=True)
class SearchParams:
    p: int
    beam_width: int = 1
    max_token: int = 4096
    seed: int = 0
    safety_margin: int = 256
    description_budget: int = 128
    ballots: int = 1
    temperature_generate: float = 0.8
    temperature_vote: float = 0.0

    def __post_init__(self):
        if self.p < 1:
            raise CampaignError("p must be >= 1")
        if not 1 <= self.beam_width <= self.p:
            raise CampaignError("beam_width must be within [1, p]")
        if not 1 <= self.ballots <= 5:
            raise CampaignError("ballots must be within [1, 5]")

    def prompt_params(self) -> PromptParams:
        return PromptParams(
            p=self.p,
            max_token=self.max_token,
            safety_margin=self.safety_margin,
            description_budget=self.description_budget,
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "beam_width": self.beam_width,
            "max_token": self.max_token,
            "seed": self.seed,
            "safety_margin": self.safety_margin,
            "description_budget": self.description_budget,
            "ballots": self.ballots,
            "temperature_generate": self.temperature_generate,
            "temperature_vote": self.temperature_vote,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SearchParams":
        return cls(**doc)


@dataclass
class CampaignResult:
    campaign_id: str
    status: str
    winners: list[ThoughtCandidate]
    winner_files: list[Path]
    directory: Path


FrontierEntry = Union[str, ThoughtCandidate]


def _entry_id(entry: FrontierEntry) -> str:
    return INPUT_PARENT if isinstance(entry, str) else entry.id


def _entry_code(entry: FrontierEntry) -> str:
    return entry if isinstance(entry, str) else entry.code


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _candidate_record(c: ThoughtCandidate) -> dict:
    return {
        "id": c.id,
        "layer": c.layer,
        "module_id": c.module_id,
        "code": c.code,
        "description": c.description,
        "parent": c.parent,
        "provenance": list(c.provenance),
    }


def _candidate_from_record(doc: dict) -> ThoughtCandidate:
    return ThoughtCandidate(
        id=doc["id"],
        layer=doc["layer"],
        module_id=doc["module_id"],
        code=doc["code"],
        description=doc["description"],
        parent=doc["parent"],
        provenance=tuple(doc["provenance"]),
    )


class SearchOrchestrator:
    """Owns one campaign directory and drives the search through it."""

    def __init__(
        self,
        registry: Registry,
        provider: Provider,
        campaign_dir: Path,
        params: SearchParams,
        rate_limiter: Optional[RateLimiter] = None,
        sleep=time.sleep,
    ):
        self.registry = registry
        self.provider = provider
        self.dir = Path(campaign_dir)
        self.params = params
        self.rate_limiter = rate_limiter
        self._sleep = sleep
        self.gateway: Optional[Gateway] = None
        # campaign state
        self.campaign_id = ""
        self.input_text = ""
        self.input_name = "input.msl"
        self.schedule: list[str] = []
        self.layer = 0
        self.frontier: list[FrontierEntry] = []
        self.status = "created"
        self.candidates: list[ThoughtCandidate] = []
        self.votes: dict[int, dict] = {}
        self.winners: list[ThoughtCandidate] = []

    # --- public entry points -------------------------------------------

    def run(
        self,
        input_text: str,
        schedule: list[str],
        input_name: str = "input.msl",
        rules: Optional[PrecedenceRuleSet] = None,
        stop_after_layer: Optional[int] = None,
    ) -> CampaignResult:
        """Run the full search; honours ``stop_after_layer`` by pausing
        with a resumable checkpoint."""
        for mid in schedule:
            self.registry.get(mid)
        if rules is not None:
            report = validate_schedule(schedule, rules, self.registry)
            if not report.ok:
                raise CampaignError(
                    "schedule violates rules: "
                    + "; ".join(v.describe() for v in report.violations)
                )
        self._warn_unparseable(input_text)
        self.input_text = input_text
        self.input_name = input_name
        self.schedule = list(schedule)
        self.campaign_id = _sha256_text(
            json.dumps(
                {
                    "input": input_text,
                    "schedule": schedule,
                    "params": self.params.to_dict(),
                },
                sort_keys=True,
            )
        )[:12]
        self.dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(
            self.dir / CAMPAIGN_FILE,
            json.dumps(
                {
                    "campaign_id": self.campaign_id,
                    "input_name": self.input_name,
                    "input_text": self.input_text,
                    "schedule": self.schedule,
                    "params": self.params.to_dict(),
                },
                indent=2,
                ensure_ascii=False,
                sort_keys=True,
            )
            + "\n",
        )
        self.gateway = Gateway(
            self.provider,
            EventLog(self.dir / EVENTS_FILE),
            rate_limiter=self.rate_limiter,
            sleep=self._sleep,
        )
        self.layer = 0
        self.frontier = [self.input_text]
        self.status = "running"
        self.candidates = []
        self.votes = {}
        self.winners = []
        self._checkpoint()
        return self._advance(stop_after_layer)

    def resume(self, stop_after_layer: Optional[int] = None) -> CampaignResult:
        """Continue from the last completed layer.

        Verifies the checkpoint checksum and the tree hash before touching
        anything; a finished campaign is a no-op that returns its result.
        """
        self._load_checkpoint()
        if self.status == "done":
            logger.info("campaign %s already finished; nothing to resume", self.campaign_id)
            return self._result()
        self.status = "running"
        return self._advance(stop_after_layer)

    def step(
        self, frontier: list[FrontierEntry], module_id: str, layer: int
    ) -> tuple[list[ThoughtCandidate], list[ThoughtCandidate]]:
        """One search iteration: expand the frontier under a module, vote,
        prune.  Returns (pool, winners)."""
        module = self.registry.get(module_id)
        pp = self.params.prompt_params()
        pool: list[ThoughtCandidate] = []
        sizes: set[SizeClass] = set()
        diagnostics: list[str] = []
        for idx, entry in enumerate(frontier):
            gen_seed = derive_seed(self.params.seed, "generate", layer, idx)
            bundle = compose_generation_prompt(entry, module, pp, gen_seed)
            sizes.add(bundle.size_class)
            request = build_chat_request(
                bundle, pp, gen_seed, self.params.temperature_generate
            )
            response = self.gateway.complete(
                request,
                meta={
                    "campaign_id": self.campaign_id,
                    "layer": layer,
                    "phase": str(Mode.GENERATE),
                    "parent": _entry_id(entry),
                    "size_class": str(bundle.size_class),
                },
            )
            try:
                pool.extend(
                    parse_generation_reply(
                        response,
                        bundle.size_class,
                        pp.p,
                        layer,
                        module.id,
                        parent_id=_entry_id(entry),
                    )
                )
            except ReplyFormatError as exc:
                diagnostics.append(f"parent {_entry_id(entry)}: {exc}")
        if not pool:
            raise LayerFailedError(layer, diagnostics or ["no candidates parsed"])
        if diagnostics:
            logger.warning("layer %d dropped some replies: %s", layer, diagnostics)
        if len(pool) == 1:
            return pool, list(pool)
        vote_size = SizeClass.LARGE if SizeClass.LARGE in sizes else SizeClass.SMALL
        # one request per ballot (multi-completion stays a generation-side
        # economy; ballots are independent draws)
        ballots = []
        for ballot_no in range(self.params.ballots):
            vote_seed = derive_seed(self.params.seed, "vote", layer, ballot_no)
            vote_bundle = compose_vote_prompt(pool, module, vote_size, pp, vote_seed)
            vote_request = build_chat_request(
                vote_bundle, pp, vote_seed, self.params.temperature_vote
            )
            response = self.gateway.complete(
                vote_request,
                meta={
                    "campaign_id": self.campaign_id,
                    "layer": layer,
                    "phase": str(Mode.VOTE),
                    "ballot": ballot_no,
                    "pool": [c.id for c in pool],
                    "size_class": str(vote_size),
                },
            )
            ballots.extend(parse_vote_reply(response, len(pool)))
        result = aggregate_votes(ballots, pool, self.params.beam_width)
        self.votes[layer] = {
            "tallies": list(result.tallies),
            "ranking": list(result.ranking),
            "winner_ids": list(result.winner_ids),
        }
        by_id = {c.id: c for c in pool}
        return pool, [by_id[cid] for cid in result.winner_ids]

    # --- internals -------------------------------------------------------

    def _advance(self, stop_after_layer: Optional[int]) -> CampaignResult:
        depth = len(self.schedule)
        try:
            while self.layer < depth:
                n = self.layer + 1
                pool, winners = self.step(self.frontier, self.schedule[n - 1], n)
                self.candidates.extend(pool)
                self.frontier = list(winners)
                self.layer = n
                if n == depth:
                    self.status = "done"
                    self.winners = list(winners)
                    self._write_winner_files()
                elif stop_after_layer is not None and n >= stop_after_layer:
                    self.status = "paused"
                    self._checkpoint()
                    return self._result()
                self._checkpoint()
        except TransportError:
            self.status = "interrupted"
            self._checkpoint()
            raise
        except LayerFailedError:
            self.status = "failed"
            self._checkpoint()
            raise
        return self._result()

    def _warn_unparseable(self, input_text: str):
        from .minilang import MiniLangError, parse

        try:
            parse(input_text)
        except MiniLangError as exc:
            logger.warning(
                "campaign input does not parse (%s); the engine is "
                "content-agnostic and will proceed",
                exc,
            )

    def _tree_json(self) -> str:
        doc = {
            "campaign_id": self.campaign_id,
            "input_name": self.input_name,
            "schedule": self.schedule,
            "candidates": [_candidate_record(c) for c in self.candidates],
            "votes": {str(k): v for k, v in sorted(self.votes.items())},
            "winners": [c.id for c in self.winners],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"

    def _checkpoint(self):
        tree_text = self._tree_json()
        _atomic_write(self.dir / TREE_FILE, tree_text)
        state = {
            "campaign_id": self.campaign_id,
            "layer": self.layer,
            "frontier": [_entry_id(e) for e in self.frontier],
            "status": self.status,
            "events": self.gateway.next_seq if self.gateway else 0,
            "tree_sha256": _sha256_text(tree_text),
        }
        body = json.dumps(state, sort_keys=True)
        _atomic_write(
            self.dir / STATE_FILE,
            json.dumps(
                {"state": state, "checksum": _sha256_text(body)},
                indent=2,
                sort_keys=True,
            )
            + "\n",
        )

    def _load_checkpoint(self):
        state_path = self.dir / STATE_FILE
        if not state_path.exists():
            raise CampaignIntegrityError(f"no checkpoint at {state_path}")
        doc = json.loads(state_path.read_text(encoding="utf-8"))
        state = doc.get("state", {})
        body = json.dumps(state, sort_keys=True)
        if _sha256_text(body) != doc.get("checksum"):
            raise CampaignIntegrityError("state checksum mismatch")
        tree_path = self.dir / TREE_FILE
        if not tree_path.exists():
            raise CampaignIntegrityError(f"missing {tree_path}")
        tree_text = tree_path.read_text(encoding="utf-8")
        if _sha256_text(tree_text) != state["tree_sha256"]:
            raise CampaignIntegrityError("tree content does not match checkpoint hash")
        campaign = json.loads((self.dir / CAMPAIGN_FILE).read_text(encoding="utf-8"))
        self.campaign_id = campaign["campaign_id"]
        self.input_text = campaign["input_text"]
        self.input_name = campaign["input_name"]
        self.schedule = list(campaign["schedule"])
        self.params = SearchParams.from_dict(campaign["params"])
        tree = json.loads(tree_text)
        self.candidates = [_candidate_from_record(d) for d in tree["candidates"]]
        self.votes = {int(k): v for k, v in tree["votes"].items()}
        by_id = {c.id: c for c in self.candidates}
        self.layer = state["layer"]
        self.status = state["status"]
        self.frontier = [
            self.input_text if fid == INPUT_PARENT else by_id[fid]
            for fid in state["frontier"]
        ]
        self.winners = [by_id[cid] for cid in tree["winners"]]
        events = EventLog(self.dir / EVENTS_FILE)
        actual = events.count()
        if actual < state["events"]:
            raise CampaignIntegrityError(
                f"event log shorter than checkpoint ({actual} < {state['events']})"
            )
        self.gateway = Gateway(
            self.provider,
            events,
            rate_limiter=self.rate_limiter,
            sleep=self._sleep,
            next_seq=state["events"],
        )

    def _write_winner_files(self):
        wdir = self.dir / WINNERS_DIR
        wdir.mkdir(exist_ok=True)
        ext = Path(self.input_name).suffix or ".msl"
        for cand in self.winners:
            digest = hashlib.md5(cand.code.encode("utf-8")).hexdigest()
            (wdir / f"{digest}{ext}").write_text(cand.code, encoding="utf-8")

    def _result(self) -> CampaignResult:
        wdir = self.dir / WINNERS_DIR
        files = sorted(wdir.iterdir()) if wdir.exists() else []
        return CampaignResult(
            campaign_id=self.campaign_id,
            status=self.status,
            winners=list(self.winners),
            winner_files=files,
            directory=self.dir,
        )


def run_search(
    input_text: str,
    schedule: list[str],
    params: SearchParams,
    registry: Registry,
    provider: Provider,
    campaign_dir: Path,
    input_name: str = "input.msl",
    rules: Optional[PrecedenceRuleSet] = None,
) -> CampaignResult:
    """Convenience wrapper: build an orchestrator and run one campaign."""
    orch = SearchOrchestrator(registry, provider, campaign_dir, params)
    return orch.run(input_text, schedule, input_name=input_name, rules=rules)


def resume(campaign_dir: Path, registry: Registry, provider: Provider) -> CampaignResult:
    """Resume the campaign checkpointed in ``campaign_dir``."""
    doc_path = Path(campaign_dir) / CAMPAIGN_FILE
    if not doc_path.exists():
        raise CampaignIntegrityError(f"no campaign at {campaign_dir}")
    params = SearchParams.from_dict(
        json.loads(doc_path.read_text(encoding="utf-8"))["params"]
    )
    orch = SearchOrchestrator(registry, provider, campaign_dir, params)
    return orch.resume()

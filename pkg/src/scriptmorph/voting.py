"""Candidate evaluation by model vote: ballot prompts, ballot parsing, and
deterministic aggregation.

Small-regime votes show every candidate's full code, fenced and indexed;
large-regime votes show only the one-line descriptions, trading fidelity
for token room.  Either way the model is asked to weigh how obfuscated a
rewrite is and how far it moved from the module's worked examples, then
answer with a single ``BEST: <index>`` line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScriptMorphError
from .gateway.types import ChatResponse, estimate_tokens
from .promptfmt import BEST_PREFIX, build_header, fence_block, parse_best_line
from .prompts import (
    SYSTEM_TEXT,
    Mode,
    PromptBundle,
    PromptParams,
    SizeClass,
    ThoughtCandidate,
    render_fe_section,
)
from .strategies import StrategyModule


class VoteMisuseError(ScriptMorphError):
    """The ballot pool is not voteable (too small, or mixed provenance)."""


class BallotFormatError(ScriptMorphError):
    """A vote reply does not carry a usable BEST line."""


@dataclass(frozen=True)
class Ballot:
    chosen_index: int
    rationale: str
    provenance: tuple[str, str, int]  # provider_id, request_id, choice index


@dataclass(frozen=True)
class VoteResult:
    tallies: tuple[int, ...]
    ranking: tuple[str, ...]  # candidate ids, best first
    winner_ids: tuple[str, ...]  # the top-b ids


VOTE_SAFEGUARD = (
    "Constraints:\n"
    "- Answer with a single line 'BEST: <index>' first; anything after it is "
    "treated as rationale.\n"
    "- Prefer candidates that keep the original behavior intact."
)


def compose_vote_prompt(
    candidates: list[ThoughtCandidate],
    module: StrategyModule,
    size_class: SizeClass,
    params: PromptParams,
    seed: int,
) -> PromptBundle:
    """Build the ballot prompt over one layer's candidate pool.

    All candidates must come from the same layer and module.  Pools larger
    than p occur whenever more than one frontier parent was expanded; the
    pool is capped at beam_width * p by construction upstream.
    """
    if len(candidates) < 2:
        raise VoteMisuseError("voting needs at least two candidates")
    layers = {c.layer for c in candidates}
    modules = {c.module_id for c in candidates}
    if len(layers) != 1 or len(modules) != 1:
        raise VoteMisuseError(
            f"mixed ballot pool: layers={sorted(layers)}, modules={sorted(modules)}"
        )
    if modules != {module.id}:
        raise VoteMisuseError("candidates belong to a different module")

    if size_class is SizeClass.SMALL:
        entries = []
        for i, cand in enumerate(candidates):
            entries.append(f"Candidate {i}:\n{fence_block(cand.code)}")
        listing = "\n".join(entries)
    else:
        missing = [i for i, c in enumerate(candidates) if not c.description]
        if missing:
            raise VoteMisuseError(
                f"compressed vote needs descriptions; candidates {missing} have none"
            )
        listing = "\n".join(
            f"Candidate {i} description: {c.description}"
            for i, c in enumerate(candidates)
        )

    sections = [
        (
            "header",
            build_header(
                module.id,
                str(Mode.VOTE),
                params.p,
                seed,
                size_class=str(size_class),
                pre_knowledge_present=module.pre_knowledge is not None,
            ),
        )
    ]
    if module.pre_knowledge is not None:
        sections.append(("pre_knowledge", "Background:\n" + module.pre_knowledge))
    sections.append(("fe_chain", render_fe_section(module)))
    sections.append(("input_code", "Candidates under review:\n" + listing))
    sections.append(
        (
            "key_prompts",
            "Instructions:\n"
            "- Judge every candidate on two axes: how obfuscated the rewrite "
            "is, and how far it departs from the module's worked examples.\n"
            f"- Answer '{BEST_PREFIX} <index>' naming the strongest candidate.",
        )
    )
    sections.append(("safeguard", VOTE_SAFEGUARD))
    user_text = "\n\n".join(t for _, t in sections)
    return PromptBundle(
        sections=tuple(sections),
        mode=Mode.VOTE,
        size_class=size_class,
        input_tokens=estimate_tokens(SYSTEM_TEXT + "\n\n" + user_text),
        per_candidate_budget=0,
    )


def parse_vote_reply(response: ChatResponse, candidate_count: int) -> list[Ballot]:
    """One ballot per reply choice; the chosen index is range-checked."""
    ballots = []
    for c, choice in enumerate(response.choices):
        index, rationale = parse_best_line(choice)
        if index is None:
            raise BallotFormatError(f"choice {c} has no '{BEST_PREFIX} <index>' line")
        if not 0 <= index < candidate_count:
            raise BallotFormatError(
                f"choice {c} voted for {index}, out of range 0..{candidate_count - 1}"
            )
        ballots.append(
            Ballot(
                chosen_index=index,
                rationale=rationale,
                provenance=(response.provider_id, response.request_id, c),
            )
        )
    return ballots


def aggregate_votes(
    ballots: list[Ballot],
    candidates: list[ThoughtCandidate],
    beam_width: int,
) -> VoteResult:
    """Tally ballots and rank candidates: most votes first, ties to the
    lowest candidate index.  Winners are the top min(beam_width, n)."""
    if not ballots:
        raise VoteMisuseError("no ballots to aggregate")
    if beam_width < 1:
        raise VoteMisuseError("beam_width must be >= 1")
    tallies = [0] * len(candidates)
    for ballot in ballots:
        if not 0 <= ballot.chosen_index < len(candidates):
            raise VoteMisuseError(f"ballot index {ballot.chosen_index} out of range")
        tallies[ballot.chosen_index] += 1
    order = sorted(range(len(candidates)), key=lambda i: (-tallies[i], i))
    ranking = tuple(candidates[i].id for i in order)
    winners = ranking[: min(beam_width, len(candidates))]
    return VoteResult(tallies=tuple(tallies), ranking=ranking, winner_ids=winners)

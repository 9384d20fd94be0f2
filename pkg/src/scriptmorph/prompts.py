"""Compound prompt generation: size classing, token budgets, section
assembly, and parsing of generation replies into candidates.

Two regimes exist, picked by token feasibility.  Small inputs ask for all
p variants inside a single reply; large inputs ask for one variant per
completion plus a one-line description that later stands in for the full
code during voting.  Every assembled prompt carries its sections in the
fixed order header, pre_knowledge (optional), fe_chain, input_code,
key_prompts, safeguard.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .errors import ScriptMorphError
from .gateway.types import ChatRequest, ChatResponse, TokenEstimate, estimate_tokens
from .promptfmt import (
    DESC_PREFIX,
    INPUT_CODE_HEADING,
    build_header,
    fence_block,
    find_fenced_blocks_with_desc,
    indent_block,
)
from .strategies import StrategyModule

logger = logging.getLogger(__name__)

SYSTEM_TEXT = "You are a careful code-rewriting assistant. Follow the constraints exactly."

SAFEGUARD_TEXT = (
    "Constraints:\n"
    "- Preserve the exact runtime behavior of the input code.\n"
    "- The rewrite must parse cleanly; no syntax or lexical errors.\n"
    "- Do not add or remove observable effects."
)

VOTE_REPLY_BUDGET = 128


class BudgetError(ScriptMorphError):
    """The token arithmetic left no room for a candidate."""


class ReplyFormatError(ScriptMorphError):
    """A generation reply does not follow the documented grammar."""


class WrongFenceCountError(ReplyFormatError):
    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"expected {expected} fenced blocks, found {found}")


class EmptyCodeBlockError(ReplyFormatError):
    pass


class MissingDescriptionError(ReplyFormatError):
    pass


class SizeClass(str, Enum):
    SMALL = "small"
    LARGE = "large"

    def __str__(self):
        return self.value


class Mode(str, Enum):
    GENERATE = "generate"
    VOTE = "vote"

    def __str__(self):
        return self.value


SECTION_ORDER = (
    "header",
    "pre_knowledge",
    "fe_chain",
    "input_code",
    "key_prompts",
    "safeguard",
)

INPUT_PARENT = "input"


@dataclass(frozen=True)
class PromptParams:
    p: int
    max_token: int
    safety_margin: int = 256
    description_budget: int = 128

    def __post_init__(self):
        if self.p < 1:
            raise ScriptMorphError("p must be >= 1")
        if self.max_token < 1:
            raise ScriptMorphError("max_token must be >= 1")


@dataclass(frozen=True)
class PromptBundle:
    sections: tuple[tuple[str, str], ...]
    mode: Mode
    size_class: SizeClass
    input_tokens: TokenEstimate
    per_candidate_budget: int

    def __post_init__(self):
        kinds = [k for k, _ in self.sections]
        expected = [k for k in SECTION_ORDER if k in kinds]
        if kinds != expected or "header" not in kinds:
            raise ScriptMorphError(f"sections out of contract order: {kinds}")

    def user_text(self) -> str:
        return "\n\n".join(text for _, text in self.sections)

    def section(self, kind: str) -> Optional[str]:
        for k, text in self.sections:
            if k == kind:
                return text
        return None


@dataclass(frozen=True)
class ThoughtCandidate:
    id: str
    layer: int
    module_id: str
    code: str
    parent: str  # candidate id, or INPUT_PARENT at layer 1
    provenance: tuple[str, str, int]  # provider_id, request_id, choice index
    description: Optional[str] = None

    def __post_init__(self):
        if not self.code:
            raise ScriptMorphError("candidate code must be non-empty")
        if self.layer < 1:
            raise ScriptMorphError("layer must be >= 1")
        if self.layer == 1 and self.parent != INPUT_PARENT:
            raise ScriptMorphError("layer-1 candidates descend from the input")


ParentLike = Union[ThoughtCandidate, str]


def _parent_code(parent: ParentLike) -> str:
    return parent.code if isinstance(parent, ThoughtCandidate) else parent


def budget_small(max_token: int, input_prompt_tokens: int, p: int) -> int:
    """Average room per candidate when all p share one reply:
    floor((max_token - input_prompt_tokens) / p)."""
    if p < 1:
        raise BudgetError("p must be >= 1")
    budget = (max_token - input_prompt_tokens) // p
    if budget <= 0:
        raise BudgetError(
            f"no room for candidates: max_token={max_token}, "
            f"input={input_prompt_tokens}, p={p} (reclassify as large)"
        )
    return budget


def budget_large(max_token: int, input_prompt_tokens: int, description_budget: int) -> int:
    """Room for a single candidate in its own reply:
    max_token - input_prompt_tokens - description_budget."""
    budget = max_token - input_prompt_tokens - description_budget
    if budget <= 0:
        raise BudgetError(
            f"no room for a candidate: max_token={max_token}, "
            f"input={input_prompt_tokens}, description={description_budget}"
        )
    return budget


def render_fe_section(module: StrategyModule) -> str:
    lines = [f"Worked examples for module {module.id}:"]
    for n, node in enumerate(module.fe_chain, start=1):
        lines.append(f"Example {n} before:")
        lines.append(indent_block(node.original))
        lines.append(f"Example {n} after:")
        lines.append(indent_block(node.transformed))
        lines.append(f"Example {n} note: {node.description}")
    return "\n".join(lines)


def _render_key_prompts(module: StrategyModule, extra: list[str]) -> str:
    lines = ["Instructions:"]
    lines += [f"- {text}" for text in module.key_prompts]
    lines += [f"- {text}" for text in extra]
    return "\n".join(lines)


def classify_size(code: str, module: StrategyModule, params: PromptParams) -> SizeClass:
    size, _ = classify_size_detail(code, module, params)
    return size


def classify_size_detail(
    code: str, module: StrategyModule, params: PromptParams
) -> tuple[SizeClass, dict]:
    """Feasibility test for the single-reply regime.

    Large iff p*est(code) + est(prompt overhead) + safety_margin strictly
    exceeds max_token, where the overhead is the fully assembled prompt
    with an empty payload (a placeholder seed stands in for the real one;
    the safety margin absorbs the digit-width difference).
    """
    code_tokens = estimate_tokens(code).count
    overhead_sections = _assemble_sections(
        module,
        code="",
        mode=Mode.GENERATE,
        size_class=SizeClass.SMALL,
        p=params.p,
        seed=0,
        description_budget=params.description_budget,
    )
    overhead_text = SYSTEM_TEXT + "\n\n" + "\n\n".join(t for _, t in overhead_sections)
    overhead = estimate_tokens(overhead_text).count
    total = params.p * code_tokens + overhead + params.safety_margin
    size = SizeClass.LARGE if total > params.max_token else SizeClass.SMALL
    addends = {
        "p_times_code": params.p * code_tokens,
        "overhead": overhead,
        "safety_margin": params.safety_margin,
        "total": total,
        "max_token": params.max_token,
    }
    logger.debug("size classification for %s: %s -> %s", module.id, addends, size)
    return size, addends


def _assemble_sections(
    module: StrategyModule,
    code: str,
    mode: Mode,
    size_class: SizeClass,
    p: int,
    seed: int,
    description_budget: int,
) -> list[tuple[str, str]]:
    sections = [
        (
            "header",
            build_header(
                module.id,
                str(mode),
                p,
                seed,
                size_class=str(size_class),
                pre_knowledge_present=module.pre_knowledge is not None,
            ),
        )
    ]
    if module.pre_knowledge is not None:
        sections.append(("pre_knowledge", "Background:\n" + module.pre_knowledge))
    sections.append(("fe_chain", render_fe_section(module)))
    sections.append(("input_code", INPUT_CODE_HEADING + "\n" + fence_block(code)))
    if size_class is SizeClass.SMALL:
        extra = [
            f"Rewrite the input code {p} different ways, in the spirit of the examples.",
            f"Return exactly {p} variants, each inside its own ``` fence.",
            f"You may precede each fence with a single line '{DESC_PREFIX} <summary>'.",
        ]
    else:
        extra = [
            "Rewrite the input code once, in the spirit of the examples.",
            "Return exactly one variant inside a single ``` fence.",
            f"Precede the fence with one line '{DESC_PREFIX} <summary>' "
            f"of at most {description_budget} tokens.",
        ]
    sections.append(("key_prompts", _render_key_prompts(module, extra)))
    sections.append(("safeguard", SAFEGUARD_TEXT))
    return sections


def compose_generation_prompt(
    parent: ParentLike,
    module: StrategyModule,
    params: PromptParams,
    seed: int,
) -> PromptBundle:
    """Assemble the generation prompt for one parent under one module."""
    code = _parent_code(parent)
    size_class = classify_size(code, module, params)
    sections = _assemble_sections(
        module,
        code=code,
        mode=Mode.GENERATE,
        size_class=size_class,
        p=params.p,
        seed=seed,
        description_budget=params.description_budget,
    )
    user_text = "\n\n".join(t for _, t in sections)
    input_tokens = estimate_tokens(SYSTEM_TEXT + "\n\n" + user_text)
    if size_class is SizeClass.SMALL:
        budget = budget_small(params.max_token, input_tokens.count, params.p)
    else:
        budget = budget_large(
            params.max_token, input_tokens.count, params.description_budget
        )
    return PromptBundle(
        sections=tuple(sections),
        mode=Mode.GENERATE,
        size_class=size_class,
        input_tokens=input_tokens,
        per_candidate_budget=budget,
    )


def build_chat_request(
    bundle: PromptBundle,
    params: PromptParams,
    seed: int,
    temperature: float,
    ballots: int = 1,
) -> ChatRequest:
    """Translate a bundle into the gateway request it implies.

    Generation: small mode packs all p candidates into one completion;
    large mode requests p parallel completions.  Vote mode requests one
    completion per ballot.
    """
    if bundle.mode is Mode.GENERATE:
        n = 1 if bundle.size_class is SizeClass.SMALL else params.p
        max_out = params.max_token - bundle.input_tokens.count
    else:
        n = ballots
        max_out = VOTE_REPLY_BUDGET
    return ChatRequest(
        system_text=SYSTEM_TEXT,
        user_text=bundle.user_text(),
        completions_requested=n,
        max_output_tokens=max(max_out, 1),
        temperature=temperature,
        seed=seed,
    )


def candidate_id(layer: int, module_id: str, request_id: str, choice: int, block: int) -> str:
    return f"{layer:02d}-{module_id}-{request_id}-c{choice}b{block}"


def parse_generation_reply(
    response: ChatResponse,
    size_class: SizeClass,
    p: int,
    layer: int,
    module_id: str,
    parent_id: str = INPUT_PARENT,
) -> list[ThoughtCandidate]:
    """Extract candidates from a generation reply.

    Small: the single choice must hold exactly p fenced blocks.  Large:
    every choice holds exactly one fenced block preceded by a DESC line.
    """
    candidates = []
    if size_class is SizeClass.SMALL:
        if len(response.choices) != 1:
            raise ReplyFormatError(
                f"single-reply regime expects 1 choice, got {len(response.choices)}"
            )
        blocks = find_fenced_blocks_with_desc(response.choices[0])
        if len(blocks) != p:
            raise WrongFenceCountError(found=len(blocks), expected=p)
        for b, (desc, code) in enumerate(blocks):
            if not code.strip():
                raise EmptyCodeBlockError(f"fenced block {b} is empty")
            candidates.append(
                ThoughtCandidate(
                    id=candidate_id(layer, module_id, response.request_id, 0, b),
                    layer=layer,
                    module_id=module_id,
                    code=code,
                    description=desc,
                    parent=parent_id,
                    provenance=(response.provider_id, response.request_id, 0),
                )
            )
        return candidates
    for c, choice in enumerate(response.choices):
        blocks = find_fenced_blocks_with_desc(choice)
        if len(blocks) != 1:
            raise WrongFenceCountError(found=len(blocks), expected=1)
        desc, code = blocks[0]
        if not code.strip():
            raise EmptyCodeBlockError(f"fenced block of choice {c} is empty")
        if not desc:
            raise MissingDescriptionError(f"choice {c} carries no {DESC_PREFIX} line")
        candidates.append(
            ThoughtCandidate(
                id=candidate_id(layer, module_id, response.request_id, c, 0),
                layer=layer,
                module_id=module_id,
                code=code,
                description=desc,
                parent=parent_id,
                provenance=(response.provider_id, response.request_id, c),
            )
        )
    return candidates

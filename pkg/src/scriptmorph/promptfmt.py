"""Textual wire format shared by the prompt composer and the offline mock.

Everything a prompt carries is plain text: a machine-readable header block
(`#HP key=value` lines), triple-backtick fences around code payloads, and
fixed heading lines for candidates and worked examples.  Real providers see
the same bytes as the mock, so the whole gateway stays provider-agnostic.

Worked examples are rendered as 4-space-indented blocks, never fenced: the
only fenced content in any prompt is the payload itself (the input code of
a generation request, or the indexed candidates of a full-code vote).
"""

from __future__ import annotations

import re
from typing import Optional

from .errors import ScriptMorphError

FENCE = "```"
HEADER_TAG = "#HP"
DESC_PREFIX = "DESC:"
BEST_PREFIX = "BEST:"
INPUT_CODE_HEADING = "Input code to transform:"
VOTE_HEADING = "Candidates under review:"

_HEADER_RE = re.compile(r"^#HP (\w+)=(.*)$", re.MULTILINE)
_BEST_RE = re.compile(r"^\s*BEST:\s*(\d+)\s*(.*)$")
_CAND_CODE_RE = re.compile(r"^Candidate (\d+):\s*$")
_CAND_DESC_RE = re.compile(r"^Candidate (\d+) description: (.*)$")
_EXAMPLE_BEFORE_RE = re.compile(r"^Example (\d+) before:\s*$")


class PromptFormatError(ScriptMorphError):
    """Malformed header or reply text."""


def build_header(
    module_id: str,
    mode: str,
    p: int,
    seed: int,
    size_class: Optional[str] = None,
    pre_knowledge_present: Optional[bool] = None,
) -> str:
    lines = [
        f"{HEADER_TAG} module={module_id}",
        f"{HEADER_TAG} mode={mode}",
        f"{HEADER_TAG} p={p}",
        f"{HEADER_TAG} seed={seed}",
    ]
    if size_class is not None:
        lines.append(f"{HEADER_TAG} size={size_class}")
    if pre_knowledge_present is not None:
        lines.append(
            f"{HEADER_TAG} pre_knowledge="
            + ("present" if pre_knowledge_present else "absent")
        )
    return "\n".join(lines)


def parse_header(text: str) -> dict:
    fields = {m.group(1): m.group(2) for m in _HEADER_RE.finditer(text)}
    missing = {"module", "mode", "p", "seed"} - set(fields)
    if missing:
        raise PromptFormatError(f"prompt header incomplete, missing {sorted(missing)}")
    try:
        fields["p"] = int(fields["p"])
        fields["seed"] = int(fields["seed"])
    except ValueError as exc:
        raise PromptFormatError(f"non-numeric header field: {exc}") from None
    if fields["mode"] not in ("generate", "vote"):
        raise PromptFormatError(f"unknown header mode {fields['mode']!r}")
    return fields


def fence_block(code: str) -> str:
    if any(line.lstrip().startswith(FENCE) for line in code.split("\n")):
        raise PromptFormatError("code contains a fence delimiter line")
    return f"{FENCE}\n{code}\n{FENCE}"


def find_fenced_blocks(text: str) -> list[str]:
    """Return the bodies of all fenced blocks, in order.

    An opening fence is a line whose stripped text starts with ``` (a
    language tag after the backticks is tolerated); the closing fence is
    the next line that is exactly ```.
    """
    blocks = []
    body: Optional[list[str]] = None
    for line in text.split("\n"):
        stripped = line.strip()
        if body is None:
            if stripped.startswith(FENCE):
                body = []
        elif stripped == FENCE:
            blocks.append("\n".join(body))
            body = None
        else:
            body.append(line)
    return blocks


def find_fenced_blocks_with_desc(text: str) -> list[tuple[Optional[str], str]]:
    """Like find_fenced_blocks, but pairs each block with the description
    from the nearest preceding non-blank ``DESC:`` line, if any."""
    out = []
    body: Optional[list[str]] = None
    pending_desc: Optional[str] = None
    for line in text.split("\n"):
        stripped = line.strip()
        if body is None:
            if stripped.startswith(FENCE):
                body = []
            elif stripped.startswith(DESC_PREFIX):
                pending_desc = stripped[len(DESC_PREFIX) :].strip()
            elif stripped:
                pending_desc = None
        elif stripped == FENCE:
            out.append((pending_desc, "\n".join(body)))
            body = None
            pending_desc = None
        else:
            body.append(line)
    return out


def indent_block(code: str) -> str:
    return "\n".join("    " + line if line else "" for line in code.split("\n"))


def _collect_indented(lines: list[str], start: int) -> tuple[str, int]:
    taken = []
    i = start
    while i < len(lines) and (lines[i].startswith("    ") or lines[i] == ""):
        taken.append(lines[i][4:] if lines[i].startswith("    ") else "")
        i += 1
    while taken and taken[-1] == "":
        taken.pop()
    return "\n".join(taken), i


def extract_example_originals(text: str) -> list[str]:
    """Pull the untransformed example blocks back out of a prompt."""
    lines = text.split("\n")
    found = []
    i = 0
    while i < len(lines):
        if _EXAMPLE_BEFORE_RE.match(lines[i]):
            block, i = _collect_indented(lines, i + 1)
            found.append(block)
        else:
            i += 1
    return found


def extract_vote_candidates(text: str) -> tuple[list[str], str]:
    """Return the indexed ballot entries of a vote prompt.

    Comes back as (entries, kind) with kind "code" when candidates are
    fenced full-code blocks and "description" when they are one-line
    summaries.  Indices must be dense from 0.
    """
    lines = text.split("\n")
    code_entries: dict[int, str] = {}
    desc_entries: dict[int, str] = {}
    i = 0
    while i < len(lines):
        m = _CAND_CODE_RE.match(lines[i])
        if m and i + 1 < len(lines) and lines[i + 1].strip().startswith(FENCE):
            body = []
            j = i + 2
            while j < len(lines) and lines[j].strip() != FENCE:
                body.append(lines[j])
                j += 1
            if j >= len(lines):
                raise PromptFormatError("unterminated candidate fence")
            code_entries[int(m.group(1))] = "\n".join(body)
            i = j + 1
            continue
        m = _CAND_DESC_RE.match(lines[i])
        if m:
            desc_entries[int(m.group(1))] = m.group(2)
        i += 1
    if code_entries and desc_entries:
        raise PromptFormatError("vote prompt mixes code and description entries")
    entries = code_entries or desc_entries
    if not entries:
        raise PromptFormatError("vote prompt contains no candidate entries")
    if sorted(entries) != list(range(len(entries))):
        raise PromptFormatError("candidate indices are not dense from 0")
    kind = "code" if code_entries else "description"
    return [entries[k] for k in sorted(entries)], kind


def parse_best_line(text: str) -> tuple[Optional[int], str]:
    """Find the first ballot line; returns (index, rationale) or (None, '')."""
    for line in text.split("\n"):
        m = _BEST_RE.match(line)
        if m:
            rationale = m.group(2).strip(" -—:\t")
            return int(m.group(1)), rationale
    return None, ""

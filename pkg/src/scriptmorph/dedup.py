"""Triple deduplication of a script corpus: by content, by syntax, by
execution sequence.

Stage 1 collapses byte-identical files (MD5 of raw bytes).  Stage 2
collapses files whose canonical syntax trees agree, which erases comment
and whitespace differences but keeps names.  Stage 3 collapses files whose
slot-normalized opcode sequences agree, which additionally erases
consistent renamings.  Later stages only see earlier survivors, so survivor
sets shrink monotonically and every removal is attributed to exactly one
stage.

Files that fail to parse survive with a warning; the pipeline removes
duplicates, never data.  Survivors land in the output directory under
their content hash (``<md5><ext>``), the naming convention the rest of the
pipeline relies on.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import ScriptMorphError
from .minilang import MiniLangError, canonical_json, compile_ast, parse


class DedupError(ScriptMorphError):
    pass


def content_hash(data: bytes) -> str:
    """MD5 of the raw bytes, lowercase hex."""
    return hashlib.md5(data).hexdigest()


def ast_hash(source: str) -> str:
    """SHA-256 of the canonical syntax-tree serialization.

    Raises ScriptSyntaxError when the source does not parse; the pipeline
    catches that and passes the file through.
    """
    return hashlib.sha256(canonical_json(parse(source)).encode("utf-8")).hexdigest()


def opcode_hash(source: str) -> str:
    """SHA-256 over the slot-normalized instruction sequence (literals
    included, variable names not)."""
    program = compile_ast(parse(source))
    return hashlib.sha256(program.serialize().encode("utf-8")).hexdigest()


@dataclass
class StageReport:
    stage: int
    label: str
    removed_count: int
    survivors: list[str]
    classes: dict[str, list[str]]  # representative path -> all member paths


@dataclass
class DedupReport:
    input_count: int
    stages: list[StageReport]
    output_manifest: dict[str, str]  # output file name -> source path
    warnings: list[str] = field(default_factory=list)

    @property
    def survivor_count(self) -> int:
        return len(self.stages[-1].survivors) if self.stages else self.input_count

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "stages": [
                {
                    "stage": s.stage,
                    "label": s.label,
                    "removed_count": s.removed_count,
                    "survivors": s.survivors,
                    "classes": s.classes,
                }
                for s in self.stages
            ],
            "output_manifest": self.output_manifest,
            "warnings": self.warnings,
        }


def _list_corpus(corpus_dir: Path) -> list[Path]:
    return [p for p in corpus_dir.iterdir() if p.is_file()]


def _collapse(
    paths: list[Path], key_of, warnings: list[str], stage_name: str
) -> tuple[list[Path], dict[str, list[str]], list[Path]]:
    """Group by key; the lexicographically smallest path survives per group.
    Files whose key cannot be computed survive unconditionally."""
    groups: dict[str, list[Path]] = {}
    passthrough: list[Path] = []
    for path in sorted(paths):
        try:
            key = key_of(path)
        except MiniLangError as exc:
            warnings.append(f"{stage_name}: {path} does not parse ({exc}); kept")
            passthrough.append(path)
            continue
        except OSError as exc:
            warnings.append(f"{stage_name}: cannot read {path} ({exc}); kept")
            passthrough.append(path)
            continue
        groups.setdefault(key, []).append(path)
    survivors = []
    classes = {}
    for key in sorted(groups, key=lambda k: str(groups[k][0])):
        members = sorted(groups[key])
        survivors.append(members[0])
        classes[str(members[0])] = [str(m) for m in members]
    all_survivors = sorted(survivors + passthrough)
    return all_survivors, classes, passthrough


def dedup(
    corpus_dir: Path,
    output_dir: Path,
    report_path: Optional[Path] = None,
    paths: Optional[Iterable[Path]] = None,
) -> DedupReport:
    """Run the three filters over ``corpus_dir`` and copy survivors to
    ``output_dir`` named by content hash.

    ``paths`` overrides corpus enumeration (the order-insensitivity tests
    feed shuffled listings through it); results never depend on input
    order because every grouping pass sorts internally.
    """
    corpus_dir = Path(corpus_dir)
    output_dir = Path(output_dir)
    if not corpus_dir.is_dir():
        raise DedupError(f"corpus directory {corpus_dir} does not exist")
    files = list(paths) if paths is not None else _list_corpus(corpus_dir)
    warnings: list[str] = []
    texts: dict[Path, str] = {}

    def read_text(path: Path) -> str:
        if path not in texts:
            texts[path] = path.read_text(encoding="utf-8")
        return texts[path]

    stage_specs = [
        (1, "content", lambda p: content_hash(p.read_bytes())),
        (2, "syntax", lambda p: ast_hash(read_text(p))),
        (3, "opcode", lambda p: opcode_hash(read_text(p))),
    ]
    survivors = sorted(files)
    input_count = len(survivors)
    stages: list[StageReport] = []
    unparseable: set[Path] = set()
    for number, label, key_of in stage_specs:
        pool = survivors
        if number > 1:
            # unparseable files ride along untouched after stage 1
            pool = [p for p in survivors if p not in unparseable]
        next_survivors, classes, passthrough = _collapse(
            pool, key_of, warnings, f"stage {number} ({label})"
        )
        unparseable.update(passthrough)
        if number > 1:
            next_survivors = sorted(next_survivors + sorted(unparseable - set(next_survivors)))
        removed = len(survivors) - len(next_survivors)
        stages.append(
            StageReport(
                stage=number,
                label=label,
                removed_count=removed,
                survivors=[str(p) for p in next_survivors],
                classes=classes,
            )
        )
        survivors = next_survivors

    output_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, str] = {}
    for path in survivors:
        try:
            digest = content_hash(path.read_bytes())
        except OSError as exc:
            warnings.append(f"copy: cannot read {path} ({exc}); skipped")
            continue
        name = digest + path.suffix
        try:
            shutil.copyfile(path, output_dir / name)
        except OSError as exc:
            warnings.append(f"copy: cannot write {name} ({exc}); skipped")
            continue
        manifest[name] = str(path)

    report = DedupReport(
        input_count=input_count,
        stages=stages,
        output_manifest=manifest,
        warnings=warnings,
    )
    if report_path is not None:
        Path(report_path).write_text(
            json.dumps(report.to_dict(), indent=2, ensure_ascii=False, sort_keys=True)
            + "\n",
            encoding="utf-8",
        )
    return report

"""Regenerates the bundled data files under src/scriptmorph/data/.

Worked-example chains are produced by running each module's reference
rewrite on small seed scripts, so every before/after pair in the shipped
JSON is real.  Run from the repository root:

    python tools/gen_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scriptmorph.minilang import compile_ast, interpret, parse, trace_equal
from scriptmorph.seeding import derive_seed
from scriptmorph.transforms import TRANSFORMS

DATA = Path(__file__).resolve().parents[1] / "src" / "scriptmorph" / "data"

EXAMPLE_SOURCES = [
    '$greet = "hello world";\necho $greet;',
    '$count = 3;\nif ($count > 2) {\n    echo "large", " batch";\n} else {\n    echo "small";\n}',
    'echo upper("report ready");\n$total = 5 + 4;\necho $total;',
]

MODULES = [
    {
        "id": "comment-insert",
        "title": "Insert unrelated comments",
        "parent": None,
        "pre_knowledge": (
            "Line comments start with // or # and never change what a "
            "script does; scanners that match raw text still see them."
        ),
        "destroys_readability": False,
        "key_prompts": [
            "Insert one unrelated comment line at a position of your choice.",
            "Leave every statement untouched.",
        ],
        "examples": 2,
    },
    {
        "id": "comment-noise",
        "title": "Inline comment noise",
        "parent": "comment-insert",
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Scatter short /* */ comments between tokens.",
            "Do not split any token.",
        ],
        "examples": 2,
    },
    {
        "id": "comment-banner",
        "title": "Banner comment header",
        "parent": "comment-noise",
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": ["Prepend a multi-line banner comment to the script."],
        "examples": 1,
    },
    {
        "id": "rename-vars",
        "title": "Rename all variables",
        "parent": None,
        "pre_knowledge": (
            "Variable names carry no meaning at runtime; renaming every "
            "occurrence consistently preserves behavior exactly."
        ),
        "destroys_readability": False,
        "key_prompts": [
            "Rename every variable to a fresh, unrelated name.",
            "Apply each renaming consistently across the whole script.",
        ],
        "examples": 2,
    },
    {
        "id": "string-split",
        "title": "Split string literals",
        "parent": None,
        "pre_knowledge": (
            "A string literal can be rebuilt from concatenated pieces; the "
            "text of the pieces no longer contains the original literal."
        ),
        "destroys_readability": False,
        "key_prompts": [
            "Split string literals into concatenated halves.",
            "Wrap each split in parentheses so evaluation order is unchanged.",
        ],
        "examples": 3,
    },
    {
        "id": "rev-wrap",
        "title": "Reverse string literals behind rev()",
        "parent": "string-split",
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Store string literals reversed and restore them with rev().",
        ],
        "examples": 2,
    },
    {
        "id": "echo-split",
        "title": "Split multi-argument echo",
        "parent": None,
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Turn one echo with several arguments into consecutive echo statements.",
        ],
        "examples": 1,
        "source_indexes": [1],
    },
    {
        "id": "dead-store",
        "title": "Insert dead assignments",
        "parent": None,
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Add an assignment to a brand-new variable that is never read.",
        ],
        "examples": 2,
    },
    {
        "id": "int-unfold",
        "title": "Unfold integer literals",
        "parent": None,
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Replace integer literals with parenthesized sums of the same value.",
        ],
        "examples": 2,
        "source_indexes": [1, 2],
    },
    {
        "id": "var-chain",
        "title": "Route assignments through temporaries",
        "parent": None,
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Assign the value to a fresh temporary first, then copy it over.",
        ],
        "examples": 2,
    },
    {
        "id": "symbol-noise",
        "title": "Redundant parentheses",
        "parent": None,
        "pre_knowledge": None,
        "destroys_readability": False,
        "key_prompts": [
            "Wrap values in redundant parentheses without changing meaning.",
        ],
        "examples": 2,
    },
    {
        "id": "xor-like-encode",
        "title": "Xor-encode string literals",
        "parent": None,
        "pre_knowledge": (
            "Encoding every string literal behind a decoder call leaves no "
            "readable text in the script body."
        ),
        "destroys_readability": True,
        "key_prompts": [
            "Hex-encode each string literal xored with a one-byte key.",
            "Route the encoded text through the xdec decoder.",
        ],
        "examples": 2,
    },
]

DESCRIPTIONS = {
    "comment-insert": "Adds an unrelated comment line; the statements are untouched.",
    "comment-noise": "Places inline block comments between tokens.",
    "comment-banner": "Prepends a banner comment block above the script.",
    "rename-vars": "Renames every variable consistently to fresh names.",
    "string-split": "Rebuilds a literal from concatenated halves inside parentheses.",
    "rev-wrap": "Stores the literal reversed and restores it through rev().",
    "echo-split": "Expands a multi-argument echo into consecutive echoes.",
    "dead-store": "Adds an assignment to a new variable that nothing reads.",
    "int-unfold": "Replaces an integer literal with a parenthesized sum.",
    "var-chain": "Routes an assignment through a fresh temporary variable.",
    "symbol-noise": "Wraps values in redundant parentheses.",
    "xor-like-encode": "Replaces literals with xor-encoded text behind xdec().",
}


def build_examples(module_id: str, count: int, source_indexes=None) -> list[dict]:
    nodes = []
    for i in range(count):
        if source_indexes is not None:
            source = EXAMPLE_SOURCES[source_indexes[i % len(source_indexes)]]
        else:
            source = EXAMPLE_SOURCES[i % len(EXAMPLE_SOURCES)]
        transformed = source
        for attempt in range(20):
            rng = random.Random(derive_seed("fixture", module_id, i, attempt))
            transformed = TRANSFORMS[module_id](source, rng)
            if transformed != source:
                break
        if transformed == source:
            raise SystemExit(f"{module_id}: example {i} did not change the source")
        parse(transformed)
        if module_id != "xor-like-encode":
            before = interpret(compile_ast(parse(source)), 10_000)
            after = interpret(compile_ast(parse(transformed)), 10_000)
            if not trace_equal(before, after):
                raise SystemExit(f"{module_id}: example {i} changed behavior")
        nodes.append(
            {
                "original": source,
                "transformed": transformed,
                "description": DESCRIPTIONS[module_id],
            }
        )
    return nodes


CORPUS = {
    "s01.msl": '// staging job\n$cmd = "run";\n$greeting = "hello " . "operator";\necho $greeting;\nif ($cmd == "run") {\n    echo upper("secret_token");\n}',
    "s02.msl": '$backdoor = "open";\necho "state: ", $backdoor;\n$note = "magic_word_9000";\necho $note;',
    "s03.msl": '$sess_key = "k-" . "291";\nif (len($sess_key) > 3) {\n    echo "session ", $sess_key;\n}',
    "s04.msl": 'echo lower("COPY_OF_ADMIN panel");\n$tries = 2 + 1;\necho $tries;\necho "copy_of_admin";',
    "s05.msl": '$payload = "hidden_payload";\necho substr($payload, 0, 6);\necho rev("gnp");',
    "s06.msl": '$cmd = "sync";\n$target = "secret_token vault";\nif ($cmd == "sync") {\n    echo $target;\n} else {\n    echo "idle";\n}',
    "s07.msl": 'echo "plan: ", "delete_everything", " later";\n$step = 4;\necho $step * 2;',
    "s08.msl": '$flag = "OVERRIDE";\necho "mode ", $flag;\nif ($flag == "OVERRIDE") {\n    echo " engaged";\n}',
    "s09.msl": '$cmd = "ping";\n$backdoor = "shut";\necho $cmd, "/", $backdoor;',
    "s10.msl": '$text = "magic_word_9000 accepted";\necho upper($text);\necho len($text);',
    "s11.msl": '$alpha = "hidden_payload marker";\n$beta = substr($alpha, 7, 7);\necho $beta;',
    "s12.msl": 'echo "audit ", "secret_token", " trail";\n$sess_key = "s77";\necho $sess_key;',
    "s13.msl": '$left = 10;\n$right = 5;\nif ($left > $right) {\n    echo "OVERRIDE granted";\n}',
    "s14.msl": '$cmd = "halt";\necho "issuing ", $cmd;\necho " copy_of_admin backup";',
    "s15.msl": '$keeper = "delete_everything queue";\necho lower($keeper);\n$count = 7 - 2;\necho $count;',
    "s16.msl": '$backdoorpath = "none";\n$backdoor = "sealed";\necho $backdoor, " ", $backdoorpath;',
    "s17.msl": '$msg = "hello " . "magic_word_9000";\necho $msg;\necho rev($msg);',
    "s18.msl": '$sess_key = "abc123";\n$cmd = "rotate";\nif ($cmd == "rotate") {\n    echo rev($sess_key);\n}',
    "s19.msl": 'echo "tag: OVERRIDE ", upper("hidden_payload");\n$n = 3 * 3;\necho $n;',
    "s20.msl": '$probe = "secret_token";\nif ($probe == "secret_token") {\n    echo "armed";\n} else {\n    echo "safe";\n}',
}

SIGNATURES = [
    {"name": "secret-token", "pattern": "secret_token", "weight": 1},
    {"name": "hidden-payload", "pattern": "hidden_payload", "weight": 1},
    {"name": "cmd-var", "pattern": "\\$cmd\\b", "weight": 1},
    {"name": "backdoor-var", "pattern": "\\$backdoor\\b", "weight": 1},
    {"name": "magic-word", "pattern": "magic_word_9000", "weight": 1},
    {"name": "admin-copy", "pattern": "copy_of_admin", "weight": 1},
    {"name": "sess-key-var", "pattern": "\\$sess_key\\b", "weight": 1},
    {"name": "delete-marker", "pattern": "delete_everything", "weight": 1},
    {"name": "override-lit", "pattern": "OVERRIDE", "weight": 1},
    {"name": "xdec-wrapper", "pattern": "xdec\\(", "weight": 2},
]

PRECEDENCE = {
    "must_precede": [
        ["comment-insert", "comment-noise"],
        ["string-split", "rev-wrap"],
    ],
    "forbidden_before": [
        ["rev-wrap", "rename-vars"],
    ],
}


def main():
    modules_dir = DATA / "modules"
    rules_dir = DATA / "rules"
    corpus_dir = DATA / "corpus"
    for d in (modules_dir, rules_dir, corpus_dir):
        d.mkdir(parents=True, exist_ok=True)
    for spec in MODULES:
        doc = {
            "id": spec["id"],
            "title": spec["title"],
            "parent": spec["parent"],
            "pre_knowledge": spec["pre_knowledge"],
            "destroys_readability": spec["destroys_readability"],
            "key_prompts": spec["key_prompts"],
            "fe_chain": build_examples(
                spec["id"], spec["examples"], spec.get("source_indexes")
            ),
        }
        path = modules_dir / f"{spec['id']}.json"
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print("wrote", path)
    (rules_dir / "precedence.json").write_text(
        json.dumps(PRECEDENCE, indent=2) + "\n", encoding="utf-8"
    )
    (rules_dir / "signatures.json").write_text(
        json.dumps(SIGNATURES, indent=2) + "\n", encoding="utf-8"
    )
    print("wrote rule files")
    for name, text in CORPUS.items():
        parse(text)
        trace = interpret(compile_ast(parse(text)), 10_000)
        if trace.halted != "done":
            raise SystemExit(f"{name} did not finish: {trace}")
        (corpus_dir / name).write_text(text + "\n", encoding="utf-8")
    print(f"wrote {len(CORPUS)} corpus scripts")


if __name__ == "__main__":
    main()

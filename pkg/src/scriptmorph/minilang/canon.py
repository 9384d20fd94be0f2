"""Canonical serialization of syntax trees.

The output is a deterministic byte string: object keys always in the order
(kind, name, children), spans dropped, 2-space indent, ``\n`` newlines,
UTF-8 with non-ASCII characters kept literal.  Two trees produce the same
bytes iff they are structurally equal.
"""

import json

from .nodes import Node


def _strip(node: Node) -> dict:
    return {
        "kind": node.kind,
        "name": node.name,
        "children": [_strip(c) for c in node.children],
    }


def canonical_json(ast: Node) -> str:
    return json.dumps(_strip(ast), indent=2, ensure_ascii=False)

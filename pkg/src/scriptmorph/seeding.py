"""Deterministic seed derivation.

Every source of randomness in a campaign is seeded through this helper so
reruns (and resumed runs) are byte-identical across processes; plain
``hash()`` is salted per process and unusable for this.
"""

import hashlib


def derive_seed(*parts) -> int:
    material = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")

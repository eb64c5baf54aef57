"""Named random streams derived from one experiment seed.

Every source of randomness (representation-set sampling, strictify noise,
random instance generators) pulls a stream by name so that a fixed seed
reproduces every artifact byte for byte.
"""

from __future__ import annotations

import hashlib
import random


def stream(seed: int, *names) -> random.Random:
    label = repr((int(seed),) + tuple(str(n) for n in names)).encode()
    digest = hashlib.sha256(label).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))

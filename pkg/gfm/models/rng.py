"""Reproducible random substreams.

Every stream is the Philox-4x64 counter-based generator keyed by the 128-bit
value ``stream_id << 64 | seed``. Deriving a substream is pure integer
arithmetic, so any component of a run can be replayed from the master seed.

* ``derive_stream(seed, label, index)`` sets ``stream_id = tag(label) << 32 | index``
  where ``tag`` is the first 32 bits of the BLAKE2b digest of the label. Streams
  with the same label never collide for ``index < 2**32``.
* ``RngStream.spawn(label, index)`` mixes the parent id with the derived id
  through splitmix64.
"""

import hashlib
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..utils.validators import require

MASK64 = (1 << 64) - 1
MAX_INDEX = 1 << 32


def _label_tag(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "big")


def splitmix64(value: int) -> int:
    """One round of the splitmix64 finalizer"""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & MASK64)

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream"""
        key = (self.stream_id << 64) | self.seed
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, label: str, index: int = 0) -> "RngStream":
        child = derive_stream(self.seed, label, index)
        mixed = splitmix64(self.stream_id ^ splitmix64(child.stream_id))
        return RngStream(self.seed, mixed)

    def to_dict(self):
        return {"seed": self.seed, "stream_id": self.stream_id}


def derive_stream(master_seed: int, purpose_label: str, index: int) -> RngStream:
    """Deterministic substream for (purpose_label, index)"""
    require(0 <= int(index) < MAX_INDEX, f"stream index must lie in [0, 2**32), got {index}", "index")
    stream_id = (_label_tag(purpose_label) << 32) | int(index)
    return RngStream(master_seed, stream_id)


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept either a stream (started fresh) or a generator already in use"""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")

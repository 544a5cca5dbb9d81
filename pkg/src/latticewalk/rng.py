"""Deterministic splittable random streams.

Streams are counter-based: output k of the stream with state s0 is
mix64(s0 + (k + 1) * GAMMA), where mix64 is the SplitMix64 finalizer.
Replica r of a master seed gets its own stream state
substream_seed(master, r) = mix64(master + (r + 1) * GAMMA), so any
replica can be generated independently of scheduling. Everything is
pure 64-bit integer arithmetic and therefore bit-identical across
platforms; the simulator's vectorized sampler reproduces these exact
formulas in numpy.

Uniform doubles take the top 53 bits of a 64-bit output, giving values
in [0, 1).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

DOUBLE_SCALE = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of 64 bits."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, replica: int) -> int:
    """Stream state for one replica of a master seed."""
    if replica < 0:
        raise ValueError(f"replica index must be >= 0: {replica}")
    return mix64((master_seed + (replica + 1) * GAMMA) & MASK64)


class SplitMix64:
    """Sequential view of one counter-based stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        return (self.next_u64() >> 11) * DOUBLE_SCALE

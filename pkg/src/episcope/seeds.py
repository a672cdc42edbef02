"""Deterministic seed derivation for parallel-safe substreams.

All stochastic components in this package derive child seed ``index`` as the
index-th output of a SplitMix64 sequence seeded at the master seed, so any
(master seed, index) pair maps to the same substream regardless of execution
order or thread count. XOR-folding the index into the master instead would
make nearby masters emit permutations of the same substream set, which
collides under permutation-invariant statistics.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(value: int) -> int:
    """One SplitMix64 step: mix ``value`` into a well-distributed 64-bit word."""
    x = (value + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def splitmix64_array(values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`splitmix64` over a uint64 array."""
    x = values.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        x += np.uint64(_GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
        return x ^ (x >> np.uint64(31))


def check_seed(seed: int, name: str = "seed") -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"{name} must be an integer, got {seed!r}")
    if not 0 <= seed <= MASK64:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {seed}")
    return int(seed)


def substream_seed(master_seed: int, index: int) -> int:
    """Child seed ``index``: that output of the SplitMix64 stream at the master."""
    return splitmix64((master_seed + index * _GOLDEN) & MASK64)


def substream_seeds(master_seed: int, count: int) -> np.ndarray:
    """Child seeds for substreams 0..count-1, as a uint64 array."""
    idx = np.arange(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return splitmix64_array(np.uint64(master_seed) + idx * np.uint64(_GOLDEN))


def philox_generator(key: int) -> np.random.Generator:
    """Counter-based generator keyed directly by a 64-bit value."""
    return np.random.Generator(np.random.Philox(key=int(key)))


_ZERO4 = np.zeros(4, dtype=np.uint64)


def rekey_philox(bit_generator: np.random.Philox, key: int) -> None:
    """Reset ``bit_generator`` to the stream Philox(key=key) would produce.

    State assignment skips the costly seeding path, which matters when a
    simulation opens hundreds of thousands of substreams.
    """
    bit_generator.state = {
        "bit_generator": "Philox",
        "state": {"counter": _ZERO4, "key": np.array([key, 0], dtype=np.uint64)},
        "buffer": _ZERO4,
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }

"""Seed derivation for reproducible, platform-independent randomness.

All generators are numpy PCG64 instances (``np.random.default_rng``), which
is a named, documented algorithm whose output is identical across platforms
for a given integer seed.  Substreams are derived arithmetically:

* trial substream:  ``seed XOR splitmix64(trial_index)``
* purpose substream within a run: ``splitmix64(seed XOR tag)``

so that trials, the initial design, and the noise draws are all independently
reproducible.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One output of the splitmix64 sequence started at ``x`` (64-bit)."""
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed of the given trial's substream."""
    return (int(master_seed) ^ splitmix64(int(trial_index))) & _MASK


def derive_stream_seed(seed: int, tag: int) -> int:
    """Seed of a tagged purpose substream (initial design, noise, ...)."""
    return splitmix64((int(seed) ^ int(tag)) & _MASK)

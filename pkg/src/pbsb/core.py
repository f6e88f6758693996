"""Shared primitives: seeded random streams, patience sampling and argmax with ties.

Every random draw in the package goes through a :class:`numpy.random.Generator`
backed by PCG64, which is bit-reproducible across platforms for a given seed.

Seed derivation
---------------
A run's streams are derived from ``(base_seed, run_index)`` with
:class:`numpy.random.SeedSequence`::

    SeedSequence(entropy=base_seed mod 2**64, spawn_key=(run_index, stream, *extra))

``stream`` is one of :data:`ENV_STREAM`, :data:`PATIENCE_STREAM` or
:data:`POLICY_STREAM`; ``extra`` optionally carries a cell key when grid cells
must not share random numbers. This mixing is part of the public contract and
will not change between versions.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ENV_STREAM = 0
PATIENCE_STREAM = 1
POLICY_STREAM = 2

TIE_TOLERANCE = 1e-12

_SEED_MASK = (1 << 64) - 1


class EmptyCandidateError(ValueError):
    """Raised when every arm is excluded from a selection."""


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a plain integer seed (masked to 64 bits)."""
    return np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))


def derive_seed_sequence(base_seed: int, run_index: int, stream: int, *extra: int) -> np.random.SeedSequence:
    if run_index < 0:
        raise ValueError(f"run_index must be non-negative, got {run_index}")
    key = (int(run_index), int(stream)) + tuple(int(e) for e in extra)
    return np.random.SeedSequence(entropy=int(base_seed) & _SEED_MASK, spawn_key=key)


def derive_rng(base_seed: int, run_index: int, stream: int, *extra: int) -> np.random.Generator:
    """Independent stream for one purpose of one run (see module docstring)."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(base_seed, run_index, stream, *extra)))


def sample_patience(rng: np.random.Generator, psi_max: int) -> int:
    """Number of individual feedbacks a user grants this round.

    Uniform on ``{0, ..., psi_max}`` inclusive.
    """
    if psi_max < 0:
        raise ValueError(f"psi_max must be >= 0, got {psi_max}")
    if psi_max == 0:
        return 0
    return int(rng.integers(0, psi_max + 1))


def argmax_tiebreak(scores, excluded: Iterable[int], rng: np.random.Generator) -> int:
    """Index of the best non-excluded score, ties broken uniformly at random.

    ``scores`` is either an array indexed by arm or a mapping ``arm -> score``.
    Scores within ``TIE_TOLERANCE`` of the maximum count as tied; ``+inf`` is a
    legal score and beats any finite value.
    """
    if isinstance(scores, Mapping):
        arms = np.fromiter(scores.keys(), dtype=np.int64, count=len(scores))
        values = np.fromiter(scores.values(), dtype=float, count=len(scores))
        excluded = set(excluded)
        if excluded:
            keep = np.fromiter((int(a) not in excluded for a in arms), dtype=bool, count=arms.shape[0])
            arms, values = arms[keep], values[keep]
    else:
        values = np.asarray(scores, dtype=float)
        arms = np.arange(values.shape[0])
        excluded = list(excluded)
        if excluded:
            keep = np.ones(values.shape[0], dtype=bool)
            keep[excluded] = False
            arms, values = arms[keep], values[keep]
    if arms.shape[0] == 0:
        raise EmptyCandidateError("no candidate arm left: every arm is excluded")
    if np.isnan(values).any():
        raise ValueError("scores must not contain NaN")

    best = values.max()
    if np.isinf(best):
        ties = np.flatnonzero(values == best)
    else:
        ties = np.flatnonzero(values >= best - TIE_TOLERANCE)
    if ties.shape[0] == 1:
        return int(arms[ties[0]])
    return int(arms[ties[rng.integers(ties.shape[0])]])


@dataclass(frozen=True)
class SuperArm:
    """The k distinct arms recommended in one round, in selection order."""

    arms: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.arms)) != len(self.arms):
            raise ValueError(f"super-arm contains duplicate arms: {self.arms}")

    def __len__(self):
        return len(self.arms)

    def __iter__(self):
        return iter(self.arms)

    def __contains__(self, arm):
        return arm in self.arms

    @property
    def k(self) -> int:
        return len(self.arms)


class Observation(NamedTuple):
    arm: int
    reward: float


PartialSubset = tuple[Observation, ...]

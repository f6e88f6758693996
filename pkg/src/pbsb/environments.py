"""Reward-generating environments and delimiter-separated dataset loaders.

Three environments produce one :class:`Interaction` per round:

* :class:`SyntheticBernoulliEnv` draws independent Bernoulli rewards;
* :class:`ClassificationReplayEnv` replays labelled rows, the hidden reward
  being the one-hot vector of the row's label;
* :class:`RatingsReplayEnv` replays users of a rating matrix binarized with a
  threshold (missing ratings count as 0).

Replay environments sample rows/users uniformly with replacement.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np


class DatasetError(ValueError):
    """Raised on malformed or inconsistent dataset files."""


class Interaction(NamedTuple):
    context: np.ndarray
    hidden_rewards: np.ndarray  # int8, one entry per arm


class Environment:
    n_arms: int
    d: int

    def draw(self, rng: np.random.Generator) -> Interaction:
        raise NotImplementedError

    def metadata(self) -> dict:
        raise NotImplementedError


@dataclass
class SyntheticBernoulliEnv(Environment):
    mu: np.ndarray
    d: int = 0
    kind = "synthetic"

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float).reshape(-1)
        if self.mu.shape[0] == 0:
            raise ValueError("synthetic environment needs at least one arm")
        if np.any((self.mu < 0) | (self.mu > 1)) or not np.all(np.isfinite(self.mu)):
            raise ValueError("arm means must lie in [0, 1]")
        self._zero = np.zeros(self.d)
        self._zero.setflags(write=False)

    @property
    def n_arms(self) -> int:
        return self.mu.shape[0]

    def draw(self, rng):
        rewards = (rng.random(self.n_arms) < self.mu).astype(np.int8)
        return Interaction(self._zero, rewards)

    def oracle_success_probability(self, k: int) -> float:
        return oracle_success_probability(self.mu, k)

    def metadata(self):
        return {"kind": self.kind, "m": self.n_arms, "d": self.d, "mu": [float(v) for v in self.mu]}


@dataclass
class ClassificationReplayEnv(Environment):
    contexts: np.ndarray  # (rows, d)
    labels: np.ndarray  # (rows,) arm ids
    n_arms: int
    label_map: dict = field(default_factory=dict)
    source: str | None = None
    kind = "classification"

    def __post_init__(self):
        self.contexts = np.asarray(self.contexts, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape[0] == 0:
            raise DatasetError("classification dataset is empty")
        if self.contexts.ndim != 2 or self.contexts.shape[0] != self.labels.shape[0]:
            raise DatasetError("contexts must be a (rows, d) array matching the labels")
        if self.labels.min() < 0 or self.labels.max() >= self.n_arms:
            raise DatasetError("labels must be arm ids in [0, n_arms)")
        self.contexts.setflags(write=False)

    @property
    def d(self) -> int:
        return self.contexts.shape[1]

    @property
    def n_rows(self) -> int:
        return self.labels.shape[0]

    def interaction(self, row: int) -> Interaction:
        rewards = np.zeros(self.n_arms, dtype=np.int8)
        rewards[self.labels[row]] = 1
        return Interaction(self.contexts[row], rewards)

    def draw(self, rng):
        return self.interaction(int(rng.integers(self.n_rows)))

    def metadata(self):
        return {
            "kind": self.kind,
            "m": self.n_arms,
            "d": self.d,
            "rows": self.n_rows,
            "label_map": {str(k): v for k, v in self.label_map.items()},
            "source": self.source,
        }


@dataclass
class RatingsReplayEnv(Environment):
    rewards: np.ndarray  # (users, items) binary
    user_contexts: np.ndarray | None = None  # (users, d)
    user_ids: list = field(default_factory=list)
    item_ids: list = field(default_factory=list)
    threshold: float = 4.0
    source: str | None = None
    kind = "ratings"

    def __post_init__(self):
        self.rewards = np.asarray(self.rewards, dtype=np.int8)
        if self.rewards.ndim != 2 or self.rewards.shape[0] == 0 or self.rewards.shape[1] == 0:
            raise DatasetError("ratings dataset is empty")
        if self.user_contexts is None:
            self.user_contexts = np.zeros((self.rewards.shape[0], 0))
        self.user_contexts = np.asarray(self.user_contexts, dtype=float)
        if self.user_contexts.shape[0] != self.rewards.shape[0]:
            raise DatasetError("one context row per user is required")
        self.rewards.setflags(write=False)
        self.user_contexts.setflags(write=False)

    @property
    def n_arms(self) -> int:
        return self.rewards.shape[1]

    @property
    def n_users(self) -> int:
        return self.rewards.shape[0]

    @property
    def d(self) -> int:
        return self.user_contexts.shape[1]

    def interaction(self, user: int) -> Interaction:
        return Interaction(self.user_contexts[user], self.rewards[user].copy())

    def draw(self, rng):
        return self.interaction(int(rng.integers(self.n_users)))

    def metadata(self):
        return {
            "kind": self.kind,
            "m": self.n_arms,
            "d": self.d,
            "users": self.n_users,
            "threshold": self.threshold,
            "source": self.source,
        }


def oracle_success_probability(mu, k: int) -> float:
    """Chance that the best possible super-arm of size ``k`` has an any-hit reward."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if not 1 <= k <= mu.shape[0]:
        raise ValueError(f"k must lie in [1, {mu.shape[0]}], got {k}")
    top = np.sort(mu)[::-1][:k]
    return float(1.0 - np.prod(1.0 - top))


# -- loaders ------------------------------------------------------------

def _read_table(path, delimiter):
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file (header row required)") from None
        header = [h.strip() for h in header]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"{path}: row {line_no} has {len(row)} fields, header has {len(header)}")
            rows.append((line_no, row))
    return header, rows


def _column_index(header, name, path):
    try:
        return header.index(name)
    except ValueError:
        raise DatasetError(f"{path}: unknown column {name!r}") from None


def _to_float(cell, path, line_no, column):
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(f"{path}: row {line_no}, column {column!r}: non-numeric value {cell!r}") from None
    if not math.isfinite(value):
        raise DatasetError(f"{path}: row {line_no}, column {column!r}: non-finite value {cell!r}")
    return value


def _label_key(values):
    """Sort labels numerically when they all parse as numbers."""
    try:
        return sorted(values, key=float)
    except ValueError:
        return sorted(values)


def load_classification_table(path, context_columns, label_column, delimiter=",") -> ClassificationReplayEnv:
    """Load a labelled table; each distinct label becomes one arm.

    Labels are mapped to arm ids in sorted order (numeric when possible).
    """
    header, rows = _read_table(path, delimiter)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    ctx_idx = [_column_index(header, c, path) for c in context_columns]
    lab_idx = _column_index(header, label_column, path)

    contexts = np.empty((len(rows), len(ctx_idx)))
    raw_labels = []
    for i, (line_no, row) in enumerate(rows):
        for j, c in enumerate(ctx_idx):
            contexts[i, j] = _to_float(row[c].strip(), path, line_no, header[c])
        label = row[lab_idx].strip()
        if not label:
            raise DatasetError(f"{path}: row {line_no}: empty label")
        raw_labels.append(label)

    label_map = {lab: i for i, lab in enumerate(_label_key(set(raw_labels)))}
    labels = np.array([label_map[lab] for lab in raw_labels], dtype=np.int64)
    return ClassificationReplayEnv(contexts, labels, len(label_map), label_map=label_map, source=str(path))


def load_ratings_table(
    path,
    user_column,
    item_column,
    rating_column,
    threshold=4.0,
    delimiter=",",
    user_context_path=None,
    user_context_columns=(),
    user_context_key=None,
) -> RatingsReplayEnv:
    """Load a (user, item, rating) table into a binary user x item reward matrix.

    A rating is a hit when ``rating >= threshold``; unrated pairs are misses.
    An optional second table supplies one context row per user, keyed by
    ``user_context_key`` (defaults to ``user_column``); users appearing only
    there are kept with all-zero rewards.
    """
    header, rows = _read_table(path, delimiter)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    u_idx = _column_index(header, user_column, path)
    i_idx = _column_index(header, item_column, path)
    r_idx = _column_index(header, rating_column, path)

    triples = []
    seen = set()
    for line_no, row in rows:
        user, item = row[u_idx].strip(), row[i_idx].strip()
        rating = _to_float(row[r_idx].strip(), path, line_no, rating_column)
        if (user, item) in seen:
            raise DatasetError(f"{path}: row {line_no}: duplicate rating for user {user!r}, item {item!r}")
        seen.add((user, item))
        triples.append((user, item, rating))

    contexts_by_user = {}
    if user_context_path is not None:
        key = user_context_key or user_column
        c_header, c_rows = _read_table(user_context_path, delimiter)
        k_idx = _column_index(c_header, key, user_context_path)
        f_idx = [_column_index(c_header, c, user_context_path) for c in user_context_columns]
        for line_no, row in c_rows:
            user = row[k_idx].strip()
            if user in contexts_by_user:
                raise DatasetError(f"{user_context_path}: row {line_no}: duplicate context for user {user!r}")
            contexts_by_user[user] = [
                _to_float(row[c].strip(), user_context_path, line_no, c_header[c]) for c in f_idx
            ]

    user_ids = _label_key({u for u, _, _ in triples} | set(contexts_by_user))
    item_ids = _label_key({i for _, i, _ in triples})
    u_pos = {u: n for n, u in enumerate(user_ids)}
    i_pos = {i: n for n, i in enumerate(item_ids)}

    rewards = np.zeros((len(user_ids), len(item_ids)), dtype=np.int8)
    for user, item, rating in triples:
        if rating >= threshold:
            rewards[u_pos[user], i_pos[item]] = 1

    user_contexts = None
    if user_context_path is not None:
        missing = [u for u in user_ids if u not in contexts_by_user]
        if missing:
            raise DatasetError(f"{user_context_path}: no context for user {missing[0]!r}")
        user_contexts = np.array([contexts_by_user[u] for u in user_ids], dtype=float).reshape(
            len(user_ids), len(user_context_columns)
        )

    return RatingsReplayEnv(
        rewards,
        user_contexts=user_contexts,
        user_ids=user_ids,
        item_ids=item_ids,
        threshold=float(threshold),
        source=str(path),
    )

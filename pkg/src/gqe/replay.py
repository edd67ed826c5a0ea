"""Bounded sample store for the hybrid online/offline scheme.

Each step's online samples are always stored; from step `start` onward,
`reuse` samples drawn uniformly (without replacement) from the store are
appended to the online batch before it is stored, so a sample can never be
counted twice in one update.  When the store exceeds `capacity`, the
highest-energy samples are evicted first (energy ties: oldest
`created_step`, then oldest arrival).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class EnergySample:
    sequence: tuple[int, ...]
    energy: float
    created_step: int
    ref_logp: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.energy):
            raise ValueError("sample energy must be finite")
        if self.created_step < 0:
            raise ValueError("created_step must be >= 0")


@dataclass(frozen=True)
class HybridConfig:
    capacity: int = 0
    reuse: int = 0
    start: int = 0
    enabled: bool = False

    def __post_init__(self) -> None:
        if min(self.capacity, self.reuse, self.start) < 0:
            raise ValueError("capacity, reuse and start must be >= 0")
        if self.enabled and self.reuse > self.capacity:
            raise ValueError("reuse must be <= capacity when enabled")


class ReplayBuffer:
    """Single-writer bounded store; the training loop owns it exclusively."""

    def __init__(self, config: HybridConfig):
        self.config = config
        self._entries: list[tuple[EnergySample, int]] = []  # (sample, arrival)
        self._arrivals = 0

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def samples(self) -> list[EnergySample]:
        return [sample for sample, _ in self._entries]

    def min_energy(self) -> float:
        if not self._entries:
            return math.inf
        return min(sample.energy for sample, _ in self._entries)

    def store(self, batch: Sequence[EnergySample]) -> None:
        """Append a batch, then evict highest-energy samples down to capacity."""
        for sample in batch:
            self._entries.append((sample, self._arrivals))
            self._arrivals += 1
        while len(self._entries) > self.config.capacity:
            worst = max(
                range(len(self._entries)),
                key=lambda i: (
                    self._entries[i][0].energy,
                    -self._entries[i][0].created_step,
                    -self._entries[i][1],
                ),
            )
            self._entries.pop(worst)

    def draw(self, count: int, rng: np.random.Generator) -> list[EnergySample]:
        """Uniform sample without replacement; the whole buffer if underfull."""
        if count <= 0 or not self._entries:
            return []
        if len(self._entries) <= count:
            return self.samples
        chosen = rng.choice(len(self._entries), size=count, replace=False)
        return [self._entries[i][0] for i in chosen]

    def assemble_step(
        self, online: Sequence[EnergySample], t: int, rng: np.random.Generator
    ) -> list[EnergySample]:
        """Samples for this step's update: the online batch, plus replayed
        samples once the scheme is active.  Drawing happens before the
        online batch is stored; storing happens every step."""
        replayed: list[EnergySample] = []
        if self.config.enabled and t >= self.config.start:
            replayed = self.draw(self.config.reuse, rng)
        self.store(online)
        return list(online) + replayed

    def dump_jsonl(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for sample, _ in self._entries:
                fh.write(
                    json.dumps(
                        {
                            "sequence": list(sample.sequence),
                            "energy": sample.energy,
                            "created_step": sample.created_step,
                        }
                    )
                )
                fh.write("\n")

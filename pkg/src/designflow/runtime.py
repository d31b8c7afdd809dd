"""Per-command runtime context: id generation, clock, session identity.

Seeded runs must be byte-reproducible, so ids and event timestamps come from
deterministic sources derived from the seed and the workspace's progress so
far (event count + node sequence). Re-running the same command on the same
workspace state therefore produces identical bytes, while successive
commands keep drawing fresh ids.
"""

from __future__ import annotations

import random
import time
import uuid
from dataclasses import dataclass
from typing import Iterable


class SystemClock:
    def now(self) -> float:
        return time.time()


class LogicalClock:
    """Monotone integer ticks, persisted implicitly as the event count."""

    def __init__(self, start: int = 0):
        self._next = start

    def now(self) -> float:
        value = float(self._next)
        self._next += 1
        return value


class RandomIdGenerator:
    def new_id(self, taken: Iterable[str] = ()) -> str:
        taken = set(taken)
        while True:
            candidate = str(uuid.uuid4())
            if candidate not in taken:
                return candidate


class SeededIdGenerator:
    def __init__(self, seed: int, salt: str = ""):
        self._rng = random.Random(f"{seed}|{salt}")

    def new_id(self, taken: Iterable[str] = ()) -> str:
        taken = set(taken)
        while True:
            candidate = str(uuid.UUID(int=self._rng.getrandbits(128), version=4))
            if candidate not in taken:
                return candidate


@dataclass
class Runtime:
    ids: SeededIdGenerator | RandomIdGenerator
    clock: LogicalClock | SystemClock
    session_id: str = "local"
    seed: int | None = None

    def new_id(self, taken: Iterable[str] = ()) -> str:
        return self.ids.new_id(taken)


def make_runtime(
    *,
    seed: int | None,
    deterministic: bool,
    event_count: int = 0,
    node_seq: int = 0,
    session_id: str = "local",
) -> Runtime:
    """Deterministic runtime when seeded or in mock mode, wall-clock otherwise."""
    if deterministic or seed is not None:
        effective = 0 if seed is None else seed
        return Runtime(
            ids=SeededIdGenerator(effective, salt=f"{event_count}:{node_seq}"),
            clock=LogicalClock(start=event_count),
            session_id=session_id,
            seed=effective,
        )
    return Runtime(ids=RandomIdGenerator(), clock=SystemClock(), session_id=session_id, seed=None)

"""Cooperative deadlines and resource caps."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import ResourceLimit


@dataclass
class Budget:
    timeout: float | None = None
    max_atoms: int = 512
    max_pair_types: int = 1 << 16
    max_classes: int = 1 << 20
    max_families: int = 1 << 20
    start: float = field(default_factory=time.monotonic)

    def elapsed_ms(self) -> float:
        return (time.monotonic() - self.start) * 1000.0

    def check(self, stats=None):
        if self.timeout is not None and time.monotonic() - self.start > self.timeout:
            raise ResourceLimit(f"timeout of {self.timeout:g}s exceeded", stats)


UNLIMITED = None

"""Instrumented operation counts.

Wall-clock numbers depend on the machine; the counts tallied here do not.
Library routines call :func:`tally` with the number of scalar operations
they perform, and whoever wants the numbers opens a :func:`counting` block:

    >>> with counting() as ops:
    ...     _ = canonical_form(from_constraints(3, [(1, 2, 1, False)]))
    >>> ops["relax"]
    64
"""

import threading
from collections import Counter
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field


@dataclass
class OpCounter:
    counts: Counter[str] = field(default_factory=Counter)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def add(self, kind: str, amount: int) -> None:
        with self._lock:
            self.counts[kind] += amount

    @property
    def total(self) -> int:
        """Scalar operations; ``calls.*`` kinds count invocations and are left out."""
        return sum(v for k, v in self.counts.items() if not k.startswith("calls."))

    def __getitem__(self, kind: str) -> int:
        return self.counts[kind]


_active: ContextVar[tuple[OpCounter, ...]] = ContextVar("_active", default=())


def tally(kind: str, amount: int) -> None:
    for counter in _active.get():
        counter.add(kind, amount)


@contextmanager
def counting() -> Iterator[OpCounter]:
    counter = OpCounter()
    token = _active.set((*_active.get(), counter))
    try:
        yield counter
    finally:
        _active.reset(token)

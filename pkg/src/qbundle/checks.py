"""Check records shared by every verification routine."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable


@dataclass(frozen=True)
class Check:
    """One verified identity.  ``witness`` is set iff the check failed."""

    name: str
    anchor: str
    passed: bool
    witness: str | None = None
    cases: int = 1

    def __post_init__(self):
        if self.passed and self.witness is not None:
            raise ValueError("a passing check carries no witness")
        if not self.passed and self.witness is None:
            raise ValueError("a failing check needs a witness")

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def line(self) -> str:
        return f"{self.name}: {self.status}"


def exhaustive(name: str, anchor: str, items: Iterable, holds: Callable, describe=repr) -> Check:
    """Check ``holds(x)`` for every item; the first failure becomes the witness."""
    n = 0
    for x in items:
        n += 1
        if not holds(x):
            return Check(name, anchor, False, describe(x), n)
    return Check(name, anchor, True, None, n)


def single(name: str, anchor: str, ok: bool, witness: str = "") -> Check:
    return Check(name, anchor, True) if ok else Check(name, anchor, False, witness or "identity fails")


@dataclass
class CheckList:
    checks: list = field(default_factory=list)

    def add(self, c: Check) -> Check:
        self.checks.append(c)
        return c

    def extend(self, cs: Iterable[Check]):
        self.checks.extend(cs)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_name(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    def __len__(self):
        return len(self.checks)

"""Three-valued verdicts for answers computed on finite truncations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Trilean(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @property
    def definite(self) -> bool:
        return self is not Trilean.UNKNOWN

    def __bool__(self) -> bool:
        # Guard against accidental truthiness tests: force explicit comparison.
        raise TypeError("Trilean is not a bool; compare with Trilean.TRUE explicitly")


TRUE = Trilean.TRUE
FALSE = Trilean.FALSE
UNKNOWN = Trilean.UNKNOWN


def tri(value: bool | None) -> Trilean:
    if value is None:
        return UNKNOWN
    return TRUE if value else FALSE


@dataclass
class CheckResult:
    """Outcome of a single named check: verdict plus a human-readable witness."""

    name: str
    verdict: Trilean
    witness: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "verdict": self.verdict.value, "witness": self.witness}


@dataclass
class Report:
    """Ordered collection of check results, rendered deterministically."""

    title: str
    results: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, verdict: Trilean, witness: str = "") -> CheckResult:
        res = CheckResult(name, verdict, witness)
        self.results.append(res)
        return res

    @property
    def all_pass(self) -> bool:
        return all(r.verdict is TRUE for r in self.results)

    @property
    def any_fail(self) -> bool:
        return any(r.verdict is FALSE for r in self.results)

    @property
    def any_unknown(self) -> bool:
        return any(r.verdict is UNKNOWN for r in self.results)

    def lines(self) -> list[str]:
        out = [self.title]
        for r in self.results:
            suffix = f"  ({r.witness})" if r.witness else ""
            out.append(f"  {r.name}: {r.verdict.value}{suffix}")
        return out

    def as_dict(self) -> dict:
        return {"title": self.title, "results": [r.as_dict() for r in self.results]}

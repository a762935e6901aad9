"""Serializable analysis and invariance reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from . import __version__
from .engine import Analysis, InvarianceTrial, NondegeneracyReport

TOOL = "crnondeg"


@dataclass
class Witness:
    k: int
    alpha: list[int]
    l: int
    row: list[str]


@dataclass
class Report:
    job: str
    verdict: str
    nondegenerate: bool
    k0: int | None
    max_order: int
    working_order: int
    target_dimension: int
    cr_dimension: int
    dims: list[int]
    examined_multiindices: list[int]
    derivative_count: int
    witnesses: list[Witness]
    tangency: str
    timing_seconds: float = 0.0
    tool: str = TOOL
    version: str = __version__

    @classmethod
    def build(cls, job: str, analysis: Analysis, result: NondegeneracyReport, seconds: float = 0.0) -> "Report":
        ladder = result.ladder
        witnesses = [Witness(g.k, list(g.alpha), g.l + 1, [str(x) for x in g.row]) for g in ladder.witnesses]
        tangency = "verified" if analysis.tangency is not None and analysis.tangency.ok else "not checked"
        n = analysis.source.n
        return cls(
            job=job,
            verdict=result.verdict,
            nondegenerate=result.nondegenerate,
            k0=result.k0,
            max_order=result.max_order,
            working_order=analysis.working_order,
            target_dimension=ladder.n_target,
            cr_dimension=n,
            dims=list(ladder.dims),
            examined_multiindices=list(ladder.examined),
            derivative_count=result.derivative_count(n),
            witnesses=witnesses,
            tangency=tangency,
            timing_seconds=round(seconds, 6),
        )

    def consistent(self) -> bool:
        """The verdict agrees with the dimensions it was derived from."""
        full = [k for k, d in enumerate(self.dims) if d == self.target_dimension]
        if self.nondegenerate:
            return bool(full) and full[0] == self.k0 and self.verdict == f"nondegenerate({self.k0})"
        return not full and self.verdict == f"degenerate_up_to({self.max_order})"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        data = dict(data)
        data["witnesses"] = [Witness(**w) for w in data["witnesses"]]
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


@dataclass
class TrialRecord:
    trial: int
    components: list[str]
    ok: bool
    verdict: str
    transformed_verdict: str
    per_order: list[dict]

    @classmethod
    def build(cls, t: InvarianceTrial) -> "TrialRecord":
        per = [{"k": k, "dim": a, "dim_transformed": b, "equal": eq} for k, a, b, eq in t.check.per_order]
        return cls(t.index, t.components, t.ok, t.original_verdict, t.transformed_verdict, per)


@dataclass
class InvarianceReport:
    job: str
    seed: int
    trials: int
    max_order: int
    all_passed: bool
    results: list[TrialRecord] = field(default_factory=list)
    timing_seconds: float = 0.0
    tool: str = TOOL
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "InvarianceReport":
        data = dict(data)
        data["results"] = [TrialRecord(**r) for r in data["results"]]
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

"""Built-in example jobs with their expected verdicts."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .engine import DEFAULT_MAX_ORDER
from .errors import CRError
from .jobs import Job, job_from_dict


def _sphere(names):
    return {
        "type": "extrinsic",
        "vars": list(names),
        "rho": [" + ".join(f"{v}*conj({v})" for v in names) + " - 1"],
        "basepoint": ["1"] + ["0"] * (len(names) - 1),
    }


def _faran(components):
    return {"source": _sphere(["Z1", "Z2"]), "target": _sphere(["W1", "W2", "W3"]), "map": {"components": components}}


QUADRIC = {"type": "graph", "vars": ["z"], "phi": ["z*conj(z)"]}
QUARTIC = {"type": "graph", "vars": ["z"], "phi": ["z^2*conj(z)^2"]}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    description: str
    job: dict
    expected_verdict: str
    expected_dims: tuple | None = None

    def load(self) -> Job:
        return job_from_dict(self.job, self.name)


CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry(
        "faran-h1", "sphere in C^2 -> sphere in C^3, (z1, z1 z2, z2^2) at (1,0)",
        _faran(["Z1", "Z1*Z2", "Z2^2"]), "nondegenerate(2)", (1, 2, 3),
    ),
    CorpusEntry(
        "faran-h2", "sphere in C^2 -> sphere in C^3, (z1^2, sqrt2 z1 z2, z2^2) at (1,0)",
        _faran(["Z1^2", "sqrt(2)*Z1*Z2", "Z2^2"]), "nondegenerate(2)", (1, 2, 3),
    ),
    CorpusEntry(
        "faran-h3", "sphere in C^2 -> sphere in C^3, (z1^3, sqrt3 z1 z2, z2^3) at (1,0)",
        _faran(["Z1^3", "sqrt(3)*Z1*Z2", "Z2^3"]), "nondegenerate(3)", (1, 2, 2, 3),
    ),
    CorpusEntry(
        "quartic-to-quadric", "(z^2, w) from Im w = |z|^4 into Im w' = |z'|^2",
        {"source": QUARTIC, "target": {"type": "graph", "vars": ["zp"], "w_vars": ["wp"], "phi": ["zp*conj(zp)"]},
         "map": {"components": ["z^2", "w"]}},
        "nondegenerate(2)", (1, 1, 2),
    ),
    CorpusEntry(
        "quadric-doubled", "(z, w, w) from Im w = |z|^2 into Im w1' = Im w2' = |z'|^2",
        {"source": QUADRIC,
         "target": {"type": "graph", "vars": ["zp"], "w_vars": ["w1", "w2"], "real_vars": ["s1", "s2"],
                    "phi": ["zp*conj(zp)", "zp*conj(zp)"]},
         "map": {"components": ["z", "w", "w"]}},
        "nondegenerate(1)", (2, 3),
    ),
    CorpusEntry(
        "webster-linear", "linear (z, 0) from the sphere in C^3 into the sphere in C^4 at (1,0,0)",
        {"truncation_order": 6, "source": _sphere(["Z1", "Z2", "Z3"]), "target": _sphere(["W1", "W2", "W3", "W4"]),
         "map": {"components": ["Z1", "Z2", "Z3", "0"]}},
        "degenerate_up_to(6)", (1, 3, 3, 3, 3, 3, 3),
    ),
    CorpusEntry(
        "zaitsev", "(z^2, z, 0) from Im w = |z|^2 into Im tau = |zeta1 + zeta2 - zeta2^2|^2 - |zeta2|^2",
        {"truncation_order": 6, "source": QUADRIC,
         "target": {"type": "extrinsic", "vars": ["zeta1", "zeta2", "tau"],
                    "rho": ["-1/2*i*(tau - conj(tau)) - (zeta1 + zeta2 - zeta2^2)*conj(zeta1 + zeta2 - zeta2^2)"
                            " + zeta2*conj(zeta2)"]},
         "map": {"components": ["z^2", "z", "0"]}},
        "degenerate_up_to(6)", (1, 2, 2, 2, 2, 2, 2),
    ),
    CorpusEntry(
        "quartic-identity", "identity of Im w = |z|^4",
        {"truncation_order": 6, "source": QUARTIC, "target": QUARTIC, "map": {"components": ["z", "w"]}},
        "degenerate_up_to(6)", (1, 1, 1, 1, 1, 1, 1),
    ),
)


def corpus_entry(name: str) -> CorpusEntry:
    for e in CORPUS:
        if e.name == name:
            return e
    raise KeyError(f"no corpus job named {name!r}")


@dataclass
class CorpusResult:
    name: str
    expected: str
    verdict: str
    dims: list[int]
    expected_dims: list[int] | None
    seconds: float
    error: str | None = None
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (
            self.error is None
            and self.verdict == self.expected
            and (self.expected_dims is None or self.dims == self.expected_dims)
        )


def run_entry(entry: CorpusEntry) -> CorpusResult:
    t0 = time.perf_counter()
    expected_dims = list(entry.expected_dims) if entry.expected_dims is not None else None
    try:
        job = entry.load()
        # expectations are pinned, so the environment default must not leak in
        report = job.analysis(job.max_order if job.max_order is not None else DEFAULT_MAX_ORDER).run()
    except CRError as exc:
        return CorpusResult(entry.name, entry.expected_verdict, "error", [], expected_dims,
                            time.perf_counter() - t0, str(exc))
    return CorpusResult(entry.name, entry.expected_verdict, report.verdict, report.dims, expected_dims,
                        time.perf_counter() - t0)


def run_corpus(entries=CORPUS) -> list[CorpusResult]:
    return [run_entry(e) for e in entries]

"""RunRecord plus its CSV and JSONL persistence."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional

CSV_HEADER = (
    "algorithm,problem,n,w,pm,delta,seed,evaluations,generations,"
    "ls_calls,ls_evaluations,improving_ls_calls,success"
)
CSV_FIELDS = CSV_HEADER.split(",")
ALGORITHMS = ("ea", "ma-fils", "ma-bils", "ls-fils", "ls-bils")


@dataclass
class RunRecord:
    algorithm: str
    problem: str
    n: int
    w: Optional[int]
    pm: Optional[float]
    delta: Optional[int]
    seed: int
    evaluations_total: int
    generations: int
    ls_calls: int = 0
    ls_evaluations: int = 0
    improving_ls_calls: int = 0
    restarts: int = 0
    best_scaled_fitness: int = 0
    success: bool = False
    # accepted scaled fitness values in order; filled only when tracing is requested
    trace: Optional[list] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("trace")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        known = {f.name for f in fields(cls)} - {"trace"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown RunRecord fields: {sorted(extra)}")
        return cls(**d)

    def csv_row(self) -> list[str]:
        return [
            self.algorithm,
            self.problem,
            str(self.n),
            _opt(self.w),
            _opt(self.pm),
            _opt(self.delta),
            str(self.seed),
            str(self.evaluations_total),
            str(self.generations),
            str(self.ls_calls),
            str(self.ls_evaluations),
            str(self.improving_ls_calls),
            "true" if self.success else "false",
        ]


def _opt(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def _parse_opt(s: str, kind):
    return None if s == "" else kind(s)


def write_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    Path(path).write_text(dumps_csv(records), newline="")


def dumps_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def read_csv(path: str | Path) -> list[RunRecord]:
    """Read records back; fields absent from the CSV schema get their defaults."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        out = []
        for row in reader:
            d = dict(zip(CSV_FIELDS, row))
            out.append(
                RunRecord(
                    algorithm=d["algorithm"],
                    problem=d["problem"],
                    n=int(d["n"]),
                    w=_parse_opt(d["w"], int),
                    pm=_parse_opt(d["pm"], float),
                    delta=_parse_opt(d["delta"], int),
                    seed=int(d["seed"]),
                    evaluations_total=int(d["evaluations"]),
                    generations=int(d["generations"]),
                    ls_calls=int(d["ls_calls"]),
                    ls_evaluations=int(d["ls_evaluations"]),
                    improving_ls_calls=int(d["improving_ls_calls"]),
                    success=d["success"] == "true",
                )
            )
        return out


def write_jsonl(records: Iterable[RunRecord], path: str | Path) -> None:
    Path(path).write_text("".join(json.dumps(r.to_dict()) + "\n" for r in records))


def read_jsonl(path: str | Path) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def read_records(path: str | Path) -> list[RunRecord]:
    return read_jsonl(path) if str(path).endswith(".jsonl") else read_csv(path)


def write_records(records: Iterable[RunRecord], path: str | Path) -> None:
    if str(path).endswith(".jsonl"):
        write_jsonl(records, path)
    else:
        write_csv(records, path)

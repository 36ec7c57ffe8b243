"""Record types for step-by-step Grover runs."""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

CSV_HEADER = ("step_index", "step_label", "success_prob", "g_groverian", "s_entropy")
_LABEL = re.compile(r"^(init|iter([1-9]\d*):(PW|Ppsi))$")


def fmt_float(x: float | None) -> str:
    """12 significant digits, locale independent; ``None`` becomes empty."""
    if x is None:
        return ""
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class TraceRecord:
    step_label: str
    success_prob: float
    g_groverian: float | None = None
    s_entropy: float | None = None


@dataclass
class EvolutionTrace:
    d: int
    n: int
    marked: int
    records: list[TraceRecord] = field(default_factory=list)

    def __post_init__(self):
        records, self.records = list(self.records), []
        for r in records:
            self.append(r)

    def append(self, record: TraceRecord) -> None:
        if not self.records and record.step_label != "init":
            raise ValueError("first record must be 'init'")
        if not _LABEL.match(record.step_label):
            raise ValueError(f"bad step label {record.step_label!r}")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i) -> TraceRecord:
        return self.records[i]

    def labels(self) -> list[str]:
        return [r.step_label for r in self.records]

    def record(self, label: str) -> TraceRecord:
        for r in self.records:
            if r.step_label == label:
                return r
        raise KeyError(label)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def full_iterations(self) -> list[TraceRecord]:
        """Records at iteration boundaries only (``init`` and each ``:Ppsi``)."""
        return [r for r in self.records if r.step_label == "init" or r.step_label.endswith(":Ppsi")]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i, r in enumerate(self.records):
            w.writerow([i, r.step_label, fmt_float(r.success_prob),
                        fmt_float(r.g_groverian), fmt_float(r.s_entropy)])
        return buf.getvalue()

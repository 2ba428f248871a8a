"""Run reports and their on-disk form (report.json + data.csv)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path


def fmt(value) -> str:
    """17 significant digits for floats so CSV output is bit-exact."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, complex):
        return "%.17g%+.17gj" % (value.real, value.imag)
    return str(value)


@dataclass
class Check:
    """One computed-vs-oracle comparison."""

    name: str
    formula: str
    value: float
    oracle: float
    tolerance: float
    relative: bool = False
    units: str = "dimensionless"

    @property
    def abs_error(self) -> float:
        return abs(self.value - self.oracle)

    @property
    def rel_error(self) -> float:
        return self.abs_error / abs(self.oracle) if self.oracle else math.inf if self.abs_error else 0.0

    @property
    def passed(self) -> bool:
        err = self.rel_error if self.relative else self.abs_error
        return bool(err <= self.tolerance)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(abs_error=self.abs_error, rel_error=self.rel_error, passed=self.passed)
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


@dataclass
class RunReport:
    scenario: dict
    checks: list[Check] = field(default_factory=list)
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    tolerance_scale: float = 1.0
    wall_time: float = 0.0

    def add(self, name, formula, value, oracle, tolerance, relative=False, units="dimensionless") -> Check:
        chk = Check(name, formula, float(value), float(oracle), tolerance * self.tolerance_scale, relative, units)
        self.checks.append(chk)
        return chk

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "tolerance_scale": self.tolerance_scale,
            "values": self.values,
            "checks": [c.as_dict() for c in self.checks],
            "wall_time_s": self.wall_time,
        }

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rpath, cpath = out / "report.json", out / "data.csv"
        rpath.write_text(json.dumps(self.as_dict(), indent=2, default=_json_default) + "\n")
        cpath.write_text(self.csv_text())
        return rpath, cpath


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")

"""Timing harness: per-explanation time vs. categorical domain size, and the
causal vs. non-causal feature-count comparison.

Absolute milliseconds are machine-dependent; only the reported orderings are
meaningful (time non-decreasing in domain size, causal slower than
non-causal). Reports serialize as JSON lines and render as aligned text
tables plus matplotlib figures written next to the data.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import __version__
from .cfe import ControlSpec, craig_interpolant
from .errors import FixtureError
from .schema import FeatureDef, FeatureSchema, Instance
from .workspace import Workspace

WARMUP_RUNS = 2


@dataclass
class BenchRow:
    fixture: str
    feature: str
    domain_size: int
    reps: int
    mean_ms: float
    std_ms: float
    samples_ms: list[float]
    low_confidence: bool
    variant: str = "scaling"

    def to_dict(self) -> dict:
        return {
            "fixture": self.fixture,
            "feature": self.feature,
            "domain_size": self.domain_size,
            "reps": self.reps,
            "mean_ms": round(self.mean_ms, 3),
            "std_ms": round(self.std_ms, 3),
            "samples_ms": [round(s, 3) for s in self.samples_ms],
            "low_confidence": self.low_confidence,
            "variant": self.variant,
        }


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    engine_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def to_jsonl(self) -> str:
        header = {"engine_version": self.engine_version, "timestamp": self.timestamp}
        lines = [json.dumps(header)]
        lines += [json.dumps(row.to_dict()) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        head = f"{'fixture':<10} {'feature':<16} {'size':>4} {'reps':>4} {'mean ms':>10} {'std ms':>9}"
        out = [head, "-" * len(head)]
        for row in self.rows:
            flag = "  (low confidence)" if row.low_confidence else ""
            out.append(
                f"{row.fixture:<10} {row.feature:<16} {row.domain_size:>4} "
                f"{row.reps:>4} {row.mean_ms:>10.1f} {row.std_ms:>9.1f}{flag}"
            )
        return "\n".join(out)


def _timed_interpolant(ws: Workspace, instance: Instance, controls: ControlSpec, reps: int):
    samples = []
    for _ in range(WARMUP_RUNS):
        craig_interpolant(ws.schema, ws.program, ws.causal, ws.decision, instance, controls)
    for _ in range(reps):
        start = time.perf_counter()
        craig_interpolant(ws.schema, ws.program, ws.causal, ws.decision, instance, controls)
        samples.append((time.perf_counter() - start) * 1000.0)
    return samples


def resize_domain(ws: Workspace, feature: str, size: int) -> Workspace:
    """Truncate the feature's domain to its first `size` values, appending
    synthetic symbols when the requested size exceeds what the data has."""
    if size < 1:
        raise FixtureError(f"domain size must be >= 1, got {size}")
    feat = ws.schema.feature(feature)
    if not feat.is_categorical:
        raise FixtureError(f"{feature!r} is not categorical")
    values = list(feat.values[:size])
    synth = 1
    while len(values) < size:
        values.append(f"synth_{synth}")
        synth += 1
    resized = FeatureDef(name=feat.name, kind=feat.kind, values=tuple(values))
    features = tuple(resized if f.name == feature else f for f in ws.schema)
    return ws.with_schema(FeatureSchema(features=features))


def _bench_controls(config: dict) -> ControlSpec:
    return ControlSpec.of(config.get("controls") or {})


def run_domain_scaling(
    ws: Workspace,
    feature: str,
    sizes: list[int],
    reps: int = 5,
    instance: Instance | None = None,
    controls: ControlSpec | None = None,
) -> BenchReport:
    """One row per requested domain size, timing the minimal-cost search."""
    report = BenchReport()
    for size in sizes:
        resized = resize_domain(ws, feature, size)
        inst = instance if instance is not None else Instance.of({})
        inst = Instance.of(
            {k: v for k, v in inst.as_dict().items() if k != feature}
        )
        samples = _timed_interpolant(resized, inst, controls or ControlSpec.of(), reps)
        report.rows.append(
            BenchRow(
                fixture=ws.name,
                feature=feature,
                domain_size=size,
                reps=reps,
                mean_ms=statistics.fmean(samples),
                std_ms=statistics.pstdev(samples) if len(samples) > 1 else 0.0,
                samples_ms=samples,
                low_confidence=reps < 5,
            )
        )
    return report


def run_causal_comparison(
    causal_ws: Workspace,
    plain_ws: Workspace,
    reps: int = 5,
    causal_config: dict | None = None,
    plain_config: dict | None = None,
) -> BenchReport:
    """Two rows: the causal configuration and the decision-only one."""
    report = BenchReport()
    for variant, ws, config in (
        ("non-causal", plain_ws, plain_config or {}),
        ("causal", causal_ws, causal_config or {}),
    ):
        instance = Instance.from_raw(ws.schema, config.get("instance") or {})
        samples = _timed_interpolant(ws, instance, _bench_controls(config), reps)
        n_categorical = sum(1 for f in ws.schema if f.is_categorical)
        report.rows.append(
            BenchRow(
                fixture=ws.name,
                feature=f"{n_categorical} categorical",
                domain_size=len(ws.schema),
                reps=reps,
                mean_ms=statistics.fmean(samples),
                std_ms=statistics.pstdev(samples) if len(samples) > 1 else 0.0,
                samples_ms=samples,
                low_confidence=reps < 5,
                variant=variant,
            )
        )
    return report


def plot_scaling(report: BenchReport, path: str | Path) -> Path:
    """Line chart of mean explanation time against domain size."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_pair: dict[tuple[str, str], list[BenchRow]] = {}
    for row in report.rows:
        by_pair.setdefault((row.fixture, row.feature), []).append(row)
    for (fixture, feature), rows in by_pair.items():
        rows = sorted(rows, key=lambda r: r.domain_size)
        ax.errorbar(
            [r.domain_size for r in rows],
            [r.mean_ms for r in rows],
            yerr=[r.std_ms for r in rows],
            marker="o",
            capsize=3,
            label=f"{fixture}/{feature}",
        )
    ax.set_xlabel("domain size")
    ax.set_ylabel("mean time per explanation (ms)")
    ax.set_title("Explanation time vs. domain size")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_causal_comparison(report: BenchReport, path: str | Path) -> Path:
    """Bar chart comparing the causal and non-causal configurations."""
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = [f"{row.variant}\n({row.feature})" for row in report.rows]
    means = [row.mean_ms for row in report.rows]
    stds = [row.std_ms for row in report.rows]
    ax.bar(labels, means, yerr=stds, capsize=4, color=["#7aa6c2", "#c27a7a"])
    ax.set_ylabel("mean time per explanation (ms)")
    ax.set_title("Causal vs. non-causal configuration")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(
    report: BenchReport, out_dir: str | Path, stem: str, kind: str = "scaling"
) -> dict[str, Path]:
    """Write the JSONL data and its figure side by side; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / f"{stem}.jsonl"
    data_path.write_text(report.to_jsonl())
    figure_path = out / f"{stem}.png"
    if kind == "scaling":
        plot_scaling(report, figure_path)
    else:
        plot_causal_comparison(report, figure_path)
    return {"data": data_path, "figure": figure_path}

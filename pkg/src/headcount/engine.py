"""Frame pipeline: parse -> filter -> track -> count, plus bench and calibrate.

One Engine owns one stream's state and processes frames strictly in order, so
counting never observes a track from a different frame. Independent streams
(one per doorway) each get their own engine. Per-frame latency covers only
the engine's own compute (association plus counting), since detector
inference happens upstream.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .counter import (
    DEFAULT_LAYOUT,
    CountLedger,
    CrossingEvent,
    Orientation,
    RegionLayout,
    classify_region,
    tally,
    update_history,
)
from .ingest import FrameRecord, filter_heads, parse_stream
from .simulator import ScenarioSpec, generate, make_scenario, evaluate
from .tracker import FeatureMetric, Tracker, TrackerConfig

# Frames excluded from latency percentiles while caches and allocator warm up.
WARMUP_FRAMES = 50


class ConfigError(ValueError):
    """Invalid engine configuration (bad field, value, or file)."""


@dataclass(frozen=True)
class LightingConfig:
    channel_tolerance: int = 2
    agreement_fraction: float = 0.99
    sample_grid: tuple[int, int] = (10, 10)

    def __post_init__(self):
        if self.channel_tolerance < 0:
            raise ConfigError("channel_tolerance must be >= 0")
        if not 0.0 < self.agreement_fraction <= 1.0:
            raise ConfigError("agreement_fraction must be in (0, 1]")
        if len(self.sample_grid) != 2 or min(self.sample_grid) < 1:
            raise ConfigError("sample_grid must be two positive integers")


@dataclass(frozen=True)
class EngineConfig:
    """Everything the pipeline needs; defaults work out of the box.

    embedding_dim=None locks the dimension from the first embedding seen in
    the stream; set it explicitly to enforce a fixed contract (e.g. 1024).
    """

    tracker: TrackerConfig = TrackerConfig()
    layout: RegionLayout = DEFAULT_LAYOUT
    min_confidence: float = 0.5
    lighting: LightingConfig = LightingConfig()
    embedding_dim: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ConfigError("min_confidence must be in [0, 1]")
        if self.embedding_dim is not None and self.embedding_dim < 1:
            raise ConfigError("embedding_dim must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {"tracker", "layout", "min_confidence", "lighting", "embedding_dim"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            tracker_data = dict(data.get("tracker", {}))
            if "feature_metric" in tracker_data:
                tracker_data["feature_metric"] = FeatureMetric(tracker_data["feature_metric"])
            tracker = TrackerConfig(**tracker_data)
            layout_data = dict(data.get("layout", {}))
            if "orientation" in layout_data:
                layout_data["orientation"] = Orientation(layout_data["orientation"])
            layout = RegionLayout(**layout_data)
            lighting_data = dict(data.get("lighting", {}))
            if "sample_grid" in lighting_data:
                lighting_data["sample_grid"] = tuple(lighting_data["sample_grid"])
            lighting = LightingConfig(**lighting_data)
            return cls(
                tracker=tracker,
                layout=layout,
                min_confidence=float(data.get("min_confidence", 0.5)),
                lighting=lighting,
                embedding_dim=data.get("embedding_dim"),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return {
            "tracker": {
                "feature_threshold": self.tracker.feature_threshold,
                "spatial_threshold": self.tracker.spatial_threshold,
                "miss_limit": self.tracker.miss_limit,
                "feature_metric": self.tracker.feature_metric.value,
            },
            "layout": {
                "line_ab": self.layout.line_ab,
                "line_bc": self.layout.line_bc,
                "orientation": self.layout.orientation.value,
            },
            "min_confidence": self.min_confidence,
            "lighting": {
                "channel_tolerance": self.lighting.channel_tolerance,
                "agreement_fraction": self.lighting.agreement_fraction,
                "sample_grid": list(self.lighting.sample_grid),
            },
            "embedding_dim": self.embedding_dim,
        }


@dataclass(frozen=True)
class LatencyStats:
    samples: int
    p50_us: float
    p95_us: float
    p99_us: float

    @property
    def max_fps(self) -> float:
        return 1e6 / self.p95_us if self.p95_us > 0 else float("inf")


@dataclass
class BenchReport:
    """Per-frame engine latency percentiles grouped by simultaneous tracks."""

    groups: dict[int, LatencyStats]
    warmup_excluded: int

    @classmethod
    def from_samples(
        cls, samples: Sequence[tuple[int, float]], warmup: int = WARMUP_FRAMES
    ) -> "BenchReport":
        """Build from (track_count, elapsed_us) pairs in collection order.

        The first `warmup` samples are dropped unless the run is too short to
        spare them.
        """
        if len(samples) > warmup:
            kept = samples[warmup:]
            excluded = warmup
        else:
            kept = samples
            excluded = 0
        by_count: dict[int, list[float]] = {}
        for count, elapsed_us in kept:
            by_count.setdefault(count, []).append(elapsed_us)
        groups = {}
        for count, values in sorted(by_count.items()):
            arr = np.asarray(values)
            p50, p95, p99 = np.percentile(arr, [50.0, 95.0, 99.0])
            groups[count] = LatencyStats(len(values), float(p50), float(p95), float(p99))
        return cls(groups=groups, warmup_excluded=excluded)

    def to_dict(self) -> dict:
        return {
            "warmup_excluded": self.warmup_excluded,
            "groups": {
                str(count): {
                    "samples": stats.samples,
                    "p50_us": stats.p50_us,
                    "p95_us": stats.p95_us,
                    "p99_us": stats.p99_us,
                    "max_fps": stats.max_fps,
                }
                for count, stats in self.groups.items()
            },
        }


class Engine:
    """Single-stream pipeline state: tracker, ledger, lighting tallies."""

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()
        self.tracker = Tracker(self.config.tracker)
        self.ledger = CountLedger()
        self.lighting_counts = {"day": 0, "night": 0, "unknown": 0}
        self.frames_processed = 0

    def process_frame(self, frame: FrameRecord) -> list[CrossingEvent]:
        """Run one frame through filter -> track -> count; returns new events."""
        mode = frame.lighting
        self.lighting_counts[mode.value if mode is not None else "unknown"] += 1
        heads = filter_heads(frame, self.config.min_confidence)
        self.tracker.step(heads, frame.frame_id, self.config.layout)
        events: list[CrossingEvent] = []
        for track in self.tracker.objects:
            region = classify_region(track.center[1], self.config.layout)
            event = update_history(track, region, frame.frame_id, frame.timestamp_ms)
            if event is not None:
                tally(self.ledger, event)
                events.append(event)
        self.frames_processed += 1
        return events


@dataclass
class RunResult:
    ledger: CountLedger
    bench: BenchReport
    frames: int
    lighting_counts: dict
    track_ids_issued: int

    @property
    def events(self) -> list[CrossingEvent]:
        return self.ledger.events

    def to_dict(self) -> dict:
        return {
            "ledger": self.ledger.snapshot(),
            "frames": self.frames,
            "events": len(self.ledger.events),
            "track_ids_issued": self.track_ids_issued,
            "lighting_frames": dict(self.lighting_counts),
            "latency": self.bench.to_dict(),
        }


def run(source, config: Optional[EngineConfig] = None) -> RunResult:
    """Process a detection stream end to end.

    `source` is a file object or iterable of stream lines. Stream violations
    raise with the offending line; config problems surface before any frame
    is touched.
    """
    cfg = config or EngineConfig()
    return run_frames(parse_stream(source, cfg.embedding_dim), cfg)


def run_frames(frames: Iterable[FrameRecord], config: Optional[EngineConfig] = None) -> RunResult:
    """Like run(), for frames that are already parsed (no stream decoding)."""
    cfg = config or EngineConfig()
    engine = Engine(cfg)
    samples: list[tuple[int, float]] = []
    for frame in frames:
        t0 = time.perf_counter_ns()
        engine.process_frame(frame)
        elapsed_us = (time.perf_counter_ns() - t0) / 1000.0
        samples.append((len(engine.tracker.objects), elapsed_us))
    return RunResult(
        ledger=engine.ledger,
        bench=BenchReport.from_samples(samples),
        frames=engine.frames_processed,
        lighting_counts=engine.lighting_counts,
        track_ids_issued=engine.tracker.ids_issued,
    )


def bench(
    scenario_names: Sequence[str],
    repetitions: int = 20,
    config: Optional[EngineConfig] = None,
    embedding_dim: Optional[int] = None,
) -> BenchReport:
    """Measure per-frame engine latency over pre-generated scenario frames.

    Frames are generated (and thus parsed) up front so the measurement covers
    association and counting only. Runs single-threaded; a fresh engine per
    repetition keeps state comparable across reps.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    cfg = config or EngineConfig()
    dim = embedding_dim or cfg.embedding_dim or 1024
    frame_sets = [generate(make_scenario(name, dim), cfg.layout)[0] for name in scenario_names]
    samples: list[tuple[int, float]] = []
    for _ in range(repetitions):
        for frames in frame_sets:
            engine = Engine(cfg)
            for frame in frames:
                t0 = time.perf_counter_ns()
                engine.process_frame(frame)
                elapsed_us = (time.perf_counter_ns() - t0) / 1000.0
                samples.append((len(engine.tracker.objects), elapsed_us))
    return BenchReport.from_samples(samples)


@dataclass(frozen=True)
class CalibrationRow:
    feature_threshold: float
    spatial_threshold: float
    miss_limit: int
    mean_accuracy: float
    runs: int


def calibrate(
    grid: dict,
    scenario_names: Sequence[str],
    seeds: Sequence[int] = (1, 2, 3),
    config: Optional[EngineConfig] = None,
    scenarios: Optional[Sequence[ScenarioSpec]] = None,
) -> list[CalibrationRow]:
    """Sweep tracker thresholds over simulated scenarios; rank by accuracy.

    `grid` maps any of feature_threshold / spatial_threshold / miss_limit to
    candidate lists; omitted axes stay at the base config. Each candidate is
    scored by mean accuracy over every (scenario, seed) pair; a scenario with
    no expected events scores 100 when the engine stays silent, else 0. Rows
    are ranked best-first with ties broken toward smaller miss_limit, then
    smaller feature_threshold, then smaller spatial_threshold, so the ranking
    is fully deterministic.
    """
    cfg = config or EngineConfig()
    dim = cfg.embedding_dim or 1024
    feature_values = list(grid.get("feature_threshold", [cfg.tracker.feature_threshold]))
    spatial_values = list(grid.get("spatial_threshold", [cfg.tracker.spatial_threshold]))
    miss_values = list(grid.get("miss_limit", [cfg.tracker.miss_limit]))
    unknown = set(grid) - {"feature_threshold", "spatial_threshold", "miss_limit"}
    if unknown:
        raise ConfigError(f"unknown calibration axes: {sorted(unknown)}")
    if not (feature_values and spatial_values and miss_values):
        raise ConfigError("calibration grid axes must be non-empty")
    base_specs = list(scenarios) if scenarios is not None else [
        make_scenario(name, dim) for name in scenario_names
    ]
    specs = [replace(spec, seed=seed) for spec in base_specs for seed in seeds]
    prepared = [generate(spec, cfg.layout) for spec in specs]
    rows: list[CalibrationRow] = []
    for t, d, e in itertools.product(feature_values, spatial_values, miss_values):
        tracker_cfg = replace(
            cfg.tracker, feature_threshold=float(t), spatial_threshold=float(d), miss_limit=int(e)
        )
        candidate = replace(cfg, tracker=tracker_cfg)
        scores = []
        for frames, truth in prepared:
            result = run_frames(frames, candidate)
            report = evaluate(result.ledger, truth)
            if report is None:
                silent = result.ledger.ins == 0 and result.ledger.outs == 0
                scores.append(100.0 if silent else 0.0)
            else:
                scores.append(report.accuracy_percent)
        rows.append(
            CalibrationRow(
                feature_threshold=float(t),
                spatial_threshold=float(d),
                miss_limit=int(e),
                mean_accuracy=float(np.mean(scores)),
                runs=len(scores),
            )
        )
    rows.sort(
        key=lambda r: (-r.mean_accuracy, r.miss_limit, r.feature_threshold, r.spatial_threshold)
    )
    return rows

"""Quality fingerprint: moment statistics of machine-load segments.

Statistics use population central moments ``m_k = mean((x - mean(x))**k)``;
skewness ``g1 = m3 / m2**1.5`` and excess kurtosis ``g2 = m4 / m2**2 - 3``.

The signal generator is the test stand-in for machining.  It is a
counter-based splitmix64 stream (value ``i`` is the splitmix64 output after
``i + 1`` increments of the seed) turned into normals with Box-Muller, so a
``(spec, seed)`` pair gives the same samples on every platform and numpy
version.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (ConstantSignal, SegmentMismatch, TooFewRuns, TooFewSamples)

MIN_SAMPLES = 8
MIN_RUNS = 3
SKEWNESS_FLOOR = 0.25
KURTOSIS_FLOOR = 0.5
FINGERPRINT_REQUIREMENT = "REQ_FINGERPRINT"


@dataclass(frozen=True)
class SignalSegment:
    segment_id: str
    samples: Tuple[float, ...]
    sample_rate: float = 1000.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size < MIN_SAMPLES:
            raise TooFewSamples(f"{self.segment_id}: need >= {MIN_SAMPLES} samples")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{self.segment_id}: samples must be finite")
        object.__setattr__(self, "samples", tuple(arr.tolist()))

    def to_dict(self):
        return {"segmentId": self.segment_id, "samples": list(self.samples),
                "sampleRate": self.sample_rate}

    @classmethod
    def from_dict(cls, d):
        return cls(d["segmentId"], tuple(d["samples"]), float(d.get("sampleRate", 1000.0)))


@dataclass(frozen=True)
class FingerprintStats:
    mean: float
    stdev: float
    skewness: float
    excess_kurtosis: float


def fingerprint(samples) -> FingerprintStats:
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < MIN_SAMPLES:
        raise TooFewSamples(f"need >= {MIN_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    if np.all(x == x[0]):
        raise ConstantSignal("zero variance")
    mean = x.mean()
    d = x - mean
    d2 = d * d
    m2 = d2.mean()
    if m2 == 0.0:
        raise ConstantSignal("zero variance")
    m3 = (d2 * d).mean()
    m4 = (d2 * d2).mean()
    return FingerprintStats(float(mean), math.sqrt(m2), float(m3 / m2 ** 1.5), float(m4 / (m2 * m2) - 3.0))


@dataclass(frozen=True)
class SegmentBounds:
    skewness: float
    kurtosis: float

    def __post_init__(self):
        if not (self.skewness > 0 and self.kurtosis > 0):
            raise ValueError("threshold bounds must be > 0")


@dataclass
class Thresholds:
    per_segment: Dict[str, SegmentBounds]
    source: str = "derived"
    default: Optional[SegmentBounds] = None

    def bounds_for(self, segment_id) -> SegmentBounds:
        b = self.per_segment.get(segment_id, self.default)
        if b is None:
            raise SegmentMismatch(f"no threshold for segment {segment_id!r}")
        return b

    def to_dict(self):
        d = {"source": self.source,
             "perSegment": {k: {"skewness": v.skewness, "kurtosis": v.kurtosis}
                            for k, v in sorted(self.per_segment.items())}}
        if self.default is not None:
            d["default"] = {"skewness": self.default.skewness, "kurtosis": self.default.kurtosis}
        return d


def _run_ids(run):
    return [s.segment_id for s in run]


def build_baseline(reference_runs, k=3.0, operator=None) -> Thresholds:
    """Per-segment bounds ``mean(|stat|) + k * std(|stat|)`` over reference runs.

    `operator` (``(a, b)`` or a mapping segment id -> ``(a, b)``) replaces the
    derived bounds entirely.  Population standard deviation is used.
    """
    if operator is not None:
        if isinstance(operator, dict):
            return Thresholds({sid: SegmentBounds(*ab) for sid, ab in operator.items()}, "operator")
        default = SegmentBounds(*operator)
        ids = _run_ids(reference_runs[0]) if reference_runs else []
        return Thresholds({sid: default for sid in ids}, "operator", default)
    if len(reference_runs) < MIN_RUNS:
        raise TooFewRuns(f"need >= {MIN_RUNS} reference runs, got {len(reference_runs)}")
    ids = _run_ids(reference_runs[0])
    if len(set(ids)) != len(ids):
        raise SegmentMismatch("duplicate segment ids in reference run")
    for run in reference_runs[1:]:
        if _run_ids(run) != ids:
            raise SegmentMismatch("reference runs have misaligned segment ids")
    per_segment = {}
    for j, sid in enumerate(ids):
        stats = [fingerprint(run[j].samples) for run in reference_runs]
        g1 = np.abs([s.skewness for s in stats])
        g2 = np.abs([s.excess_kurtosis for s in stats])
        a = max(float(g1.mean() + k * g1.std()), SKEWNESS_FLOOR)
        b = max(float(g2.mean() + k * g2.std()), KURTOSIS_FLOOR)
        per_segment[sid] = SegmentBounds(a, b)
    return Thresholds(per_segment, "derived")


@dataclass(frozen=True)
class SegmentVerdict:
    segment_id: str
    passed: bool
    stats: Optional[FingerprintStats]
    bounds: SegmentBounds
    reason: str = ""


@dataclass
class QualityVerdict:
    segments: List[SegmentVerdict] = field(default_factory=list)

    @property
    def overall(self):
        return all(s.passed for s in self.segments)

    def to_dict(self):
        out = []
        for s in self.segments:
            d = {"segmentId": s.segment_id, "passed": s.passed, "reason": s.reason,
                 "skewnessBound": s.bounds.skewness, "kurtosisBound": s.bounds.kurtosis}
            if s.stats is not None:
                d.update(mean=s.stats.mean, stdev=s.stats.stdev, skewness=s.stats.skewness,
                         excessKurtosis=s.stats.excess_kurtosis)
            out.append(d)
        return {"overall": self.overall, "segments": out}


def _judge(segment: SignalSegment, bounds: SegmentBounds) -> SegmentVerdict:
    try:
        st = fingerprint(segment.samples)
    except ConstantSignal as exc:
        return SegmentVerdict(segment.segment_id, False, None, bounds, f"ConstantSignal: {exc}")
    reasons = []
    if abs(st.skewness) > bounds.skewness:
        reasons.append(f"|skewness| {abs(st.skewness):.4g} > {bounds.skewness:.4g}")
    if abs(st.excess_kurtosis) > bounds.kurtosis:
        reasons.append(f"|kurtosis| {abs(st.excess_kurtosis):.4g} > {bounds.kurtosis:.4g}")
    return SegmentVerdict(segment.segment_id, not reasons, st, bounds, "; ".join(reasons))


def evaluate(segments, thresholds: Thresholds, workers=1) -> QualityVerdict:
    """Judge every segment against its bounds; results ordered by segment id."""
    pairs = [(s, thresholds.bounds_for(s.segment_id)) for s in segments]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda p: _judge(*p), pairs))
    else:
        verdicts = [_judge(*p) for p in pairs]
    return QualityVerdict(sorted(verdicts, key=lambda v: v.segment_id))


# deterministic signal generator

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, start, count):
    """Outputs ``start .. start+count-1`` of the splitmix64 stream seeded with `seed`."""
    i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + i * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms(seed, start, count):
    """Doubles in (0, 1) from the top 53 bits of each stream value."""
    return ((splitmix64(seed, start, count) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def derive_seed(seed, index):
    """Child seed for sub-stream `index` (one splitmix64 output)."""
    return int(splitmix64(seed ^ 0x5EED5EED5EED5EED, index, 1)[0])


@dataclass(frozen=True)
class SignalSpec:
    level: float = 1.0
    sigma: float = 0.05
    n_samples: int = 2048
    anomaly: str = "none"       # none | spikes | drift
    amp: float = 8.0            # spike height in sigmas
    prob: float = 0.01          # per-sample spike probability
    slope: float = 0.0          # drift per sample
    sample_rate: float = 1000.0

    def __post_init__(self):
        if self.n_samples < MIN_SAMPLES:
            raise TooFewSamples(f"n_samples must be >= {MIN_SAMPLES}")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.anomaly not in ("none", "spikes", "drift"):
            raise ValueError(f"unknown anomaly {self.anomaly!r}")

    @classmethod
    def from_dict(cls, d):
        keys = {"level": "level", "sigma": "sigma", "nSamples": "n_samples", "anomaly": "anomaly",
                "amp": "amp", "prob": "prob", "slope": "slope", "sampleRate": "sample_rate"}
        return cls(**{keys[k]: v for k, v in d.items() if k in keys})


def generate_signal(spec: SignalSpec, seed: int, segment_id="S0") -> SignalSegment:
    n = spec.n_samples
    pairs = (n + 1) // 2
    u = uniforms(seed, 0, 2 * pairs)
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    normals = np.empty(2 * pairs)
    normals[0::2] = radius * np.cos(2.0 * np.pi * u2)
    normals[1::2] = radius * np.sin(2.0 * np.pi * u2)
    x = spec.level + spec.sigma * normals[:n]
    if spec.anomaly == "spikes":
        hits = uniforms(seed, 2 * pairs, n) < spec.prob
        x = x + np.where(hits, spec.amp * spec.sigma, 0.0)
    elif spec.anomaly == "drift":
        x = x + spec.slope * np.arange(n)
    return SignalSegment(segment_id, tuple(x.tolist()), spec.sample_rate)


def generate_run(spec: SignalSpec, seed: int, segment_ids) -> List[SignalSegment]:
    """One segment per id, each on its own derived sub-stream."""
    return [generate_signal(spec, derive_seed(seed, i), sid) for i, sid in enumerate(segment_ids)]


def compose_measurement_report(order, pmi, verdict: QualityVerdict, segment_features=None,
                               submodel_id=None):
    """Quality Control for Machining submodel with one result per segment.

    Each segment result references the PMI requirement attached to the
    segment's feature; segments without one reference a process-fingerprint
    requirement that is appended to the requirement list.
    """
    from .templates.builders import QualityRequirement, QualityResult, build_quality_report

    segment_features = segment_features or {}
    by_feature = {}
    for r in pmi:
        if r.feature_ref:
            by_feature.setdefault(r.feature_ref, r.requirement_id)
    requirements = list(pmi)
    results = []
    for s in verdict.segments:
        req_id = by_feature.get(segment_features.get(s.segment_id))
        if req_id is None:
            req_id = FINGERPRINT_REQUIREMENT
            if all(r.requirement_id != req_id for r in requirements):
                requirements.append(QualityRequirement(req_id, "ProcessFingerprint", 0.0, 0.0, 0.0, "1"))
        measurements = {"skewnessBound": s.bounds.skewness, "kurtosisBound": s.bounds.kurtosis}
        if s.stats is not None:
            measurements.update(mean=s.stats.mean, stdev=s.stats.stdev,
                                skewness=s.stats.skewness, excessKurtosis=s.stats.excess_kurtosis)
        results.append(QualityResult(req_id, s.segment_id, s.passed, measurements, s.reason))
    return build_quality_report(requirements, results,
                                submodel_id=submodel_id or f"urn:maasx:sm:qc:{order.order_id}",
                                order_id=order.order_id, product_aas_id=order.product_aas_id,
                                overall=verdict.overall)

import math
import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maasx.aas import canonical_serialize
from maasx.errors import ConstantSignal, SegmentMismatch, TooFewRuns, TooFewSamples
from maasx.quality import (KURTOSIS_FLOOR, SKEWNESS_FLOOR, QualityVerdict, SegmentBounds,
                           SignalSegment, SignalSpec, Thresholds, build_baseline,
                           compose_measurement_report, derive_seed, evaluate, fingerprint,
                           generate_run, generate_signal, splitmix64)
from maasx.templates import (QUALITY_CONTROL, OrderDraft, OrderLine, QualityRequirement,
                             parse_quality_report, validate)

import oracles
from conftest import fixture_json

SPEC = SignalSpec.from_dict(fixture_json("supplier-a.json")["signal"])
SPIKES = replace(SPEC, anomaly="spikes", amp=8.0, prob=0.01)
IDS = [f"SEG{i:02d}" for i in range(1, 6)]


# moments

def test_symmetric_series():
    st_ = fingerprint([1, 2, 3, 4, 5, 1, 2, 3, 4, 5])
    assert st_.skewness == pytest.approx(0.0, abs=1e-12)
    _, _, _, g2 = oracles.moments([1, 2, 3, 4, 5])
    assert st_.excess_kurtosis == pytest.approx(g2, abs=1e-12) and g2 == pytest.approx(-1.3)


def test_one_outlier_series():
    # repeating the series leaves population moments unchanged, and gets past the 8-sample minimum
    st_ = fingerprint([0, 0, 0, 0, 10] * 2)
    _, _, g1, g2 = oracles.moments([0, 0, 0, 0, 10])
    assert (g1, g2) == (pytest.approx(1.5), pytest.approx(0.25))
    assert st_.skewness == pytest.approx(g1, abs=1e-12)
    assert st_.excess_kurtosis == pytest.approx(g2, abs=1e-12)


def test_constant_and_short_inputs():
    with pytest.raises(ConstantSignal):
        fingerprint([7] * 8)
    with pytest.raises(TooFewSamples):
        fingerprint([1, 2, 3])
    with pytest.raises(ValueError):
        fingerprint([1, 2, 3, 4, 5, 6, 7, float("nan")])


def test_matches_direct_moments():
    rng = random.Random(12)
    for _ in range(100):
        n = int(math.exp(rng.uniform(math.log(8), math.log(3000))))
        xs = [rng.gauss(rng.uniform(-5, 5), rng.uniform(0.1, 3)) ** rng.choice([1, 3]) for _ in range(n)]
        got = fingerprint(xs)
        want = oracles.moments(xs)
        for a, b in zip((got.mean, got.stdev, got.skewness, got.excess_kurtosis), want):
            assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=100)
@given(st.lists(st.floats(-100, 100), min_size=8, max_size=200).filter(lambda v: max(v) - min(v) > 1e-3),
       st.floats(0.01, 100), st.floats(-1000, 1000))
def test_location_scale_invariance(xs, alpha, beta):
    a = fingerprint(xs)
    b = fingerprint([alpha * x + beta for x in xs])
    assert b.skewness == pytest.approx(a.skewness, rel=1e-9, abs=1e-9)
    assert b.excess_kurtosis == pytest.approx(a.excess_kurtosis, rel=1e-9, abs=1e-9)


# baselines

def test_identical_runs_hit_the_floors():
    run = generate_run(SPEC, 1, IDS)
    th = build_baseline([run, run, run], k=3)
    assert th.source == "derived"
    for sid in IDS:
        b = th.per_segment[sid]
        st_ = fingerprint(run[IDS.index(sid)].samples)
        assert b.skewness == max(abs(st_.skewness), SKEWNESS_FLOOR)
        assert b.kurtosis == max(abs(st_.excess_kurtosis), KURTOSIS_FLOOR)


def test_operator_override_wins():
    runs = [generate_run(SPEC, s, IDS) for s in range(3)]
    th = build_baseline(runs, operator=(0.8, 1.2))
    assert th.source == "operator"
    assert set(th.per_segment) == set(IDS)
    assert all(b == SegmentBounds(0.8, 1.2) for b in th.per_segment.values())
    assert build_baseline([], operator=(0.8, 1.2)).bounds_for("SEG99") == SegmentBounds(0.8, 1.2)


def test_k3_recompute_from_oracle():
    runs = [generate_run(SPEC, derive_seed(42, r + 1), IDS) for r in range(5)]
    th = build_baseline(runs, k=3)
    for j, sid in enumerate(IDS):
        g1 = [abs(oracles.moments(run[j].samples)[2]) for run in runs]
        g2 = [abs(oracles.moments(run[j].samples)[3]) for run in runs]
        mean1, mean2 = math.fsum(g1) / 5, math.fsum(g2) / 5
        sd1 = math.sqrt(math.fsum((v - mean1) ** 2 for v in g1) / 5)
        sd2 = math.sqrt(math.fsum((v - mean2) ** 2 for v in g2) / 5)
        assert th.per_segment[sid].skewness == pytest.approx(max(mean1 + 3 * sd1, SKEWNESS_FLOOR), abs=1e-9)
        assert th.per_segment[sid].kurtosis == pytest.approx(max(mean2 + 3 * sd2, KURTOSIS_FLOOR), abs=1e-9)


def test_baseline_errors():
    runs = [generate_run(SPEC, s, IDS) for s in range(3)]
    with pytest.raises(TooFewRuns):
        build_baseline(runs[:2])
    with pytest.raises(SegmentMismatch):
        build_baseline(runs[:2] + [generate_run(SPEC, 9, IDS[::-1])])


def test_bounds_must_be_positive():
    with pytest.raises(ValueError):
        SegmentBounds(0.0, 1.0)


# evaluation

def _thresholds(seed=42):
    return build_baseline([generate_run(SPEC, derive_seed(seed, r + 1), IDS) for r in range(5)], k=3)


def test_clean_run_passes():
    verdict = evaluate(generate_run(SPEC, derive_seed(42, 0), IDS), _thresholds())
    assert verdict.overall


def test_spike_run_fails_on_kurtosis():
    th = _thresholds(7)
    verdict = evaluate(generate_run(SPIKES, derive_seed(7, 0), IDS), th)
    assert not verdict.overall
    for v in verdict.segments:
        if not v.passed:
            g2 = oracles.moments(generate_signal(SPIKES, derive_seed(derive_seed(7, 0), IDS.index(v.segment_id)),
                                                 v.segment_id).samples)[3]
            assert abs(g2) > v.bounds.kurtosis


def test_missing_threshold():
    with pytest.raises(SegmentMismatch):
        evaluate(generate_run(SPEC, 1, ["SEG77"]), _thresholds())


def test_constant_segment_fails_with_reason():
    seg = SignalSegment("SEG01", (1.0,) * 16)
    (v,) = evaluate([seg], Thresholds({"SEG01": SegmentBounds(1, 1)})).segments
    assert not v.passed and v.reason.startswith("ConstantSignal")


def test_overall_is_conjunction():
    rng = random.Random(3)
    for _ in range(30):
        segs = [generate_signal(SPIKES if rng.random() < 0.3 else SPEC, rng.randint(0, 10 ** 9), sid)
                for sid in IDS]
        verdict = evaluate(segs, _thresholds(), workers=rng.choice([1, 4]))
        assert verdict.overall == all(v.passed for v in verdict.segments)
        assert [v.segment_id for v in verdict.segments] == IDS


def test_parallel_matches_serial():
    segs = generate_run(SPIKES, 5, IDS)
    assert evaluate(segs, _thresholds(), workers=4) == evaluate(segs, _thresholds(), workers=1)


# generator

def test_splitmix64_reference_values():
    # first outputs for seed 0 as published with the reference C implementation
    assert [int(v) for v in splitmix64(0, 0, 3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
                                                    0x06C45D188009454F]


def test_generator_is_deterministic():
    assert generate_signal(SPEC, 42) == generate_signal(SPEC, 42)
    assert generate_signal(SPEC, 42) != generate_signal(SPEC, 43)


@pytest.mark.parametrize("slope", [1e-6, 1e-5, 2e-5])
def test_drift_raises_skewness_for_the_fixture(slope):
    seed = fixture_json("seeds.json")["clean"]
    plain = oracles.moments(generate_signal(SPEC, seed).samples)[2]
    drift = oracles.moments(generate_signal(replace(SPEC, anomaly="drift", slope=slope), seed).samples)[2]
    assert abs(drift) > abs(plain)


def test_steep_drift_dilutes_skewness():
    # a linear ramp is a symmetric component; once it dominates, g1 heads to zero
    seed = fixture_json("seeds.json")["clean"]
    plain = oracles.moments(generate_signal(SPEC, seed).samples)[2]
    steep = oracles.moments(generate_signal(replace(SPEC, anomaly="drift", slope=1e-3), seed).samples)[2]
    assert abs(steep) < abs(plain)


def test_mean_within_standard_error():
    spec = replace(SPEC, n_samples=10_000)
    for seed in range(5):
        xs = generate_signal(spec, seed).samples
        assert abs(math.fsum(xs) / len(xs) - spec.level) <= 4 * spec.sigma / math.sqrt(len(xs))


def test_spike_positions_follow_probability():
    x = np.array(generate_signal(replace(SPIKES, n_samples=100_000), 11).samples)
    frac = np.mean(x > SPEC.level + 6 * SPEC.sigma)
    assert 0.007 < frac < 0.013


def test_spec_validation():
    with pytest.raises(TooFewSamples):
        SignalSpec(n_samples=4)
    with pytest.raises(ValueError):
        SignalSpec(sigma=0)
    with pytest.raises(ValueError):
        SignalSpec(anomaly="wobble")


# measurement report

ORDER = OrderDraft("ORD-0001", "buyer-1", [OrderLine("bracket", 10, "2026-03-31")], "urn:maasx:aas:part:bracket")
PMI = [QualityRequirement("PMI-01", "Diameter", 8.0, -0.01, 0.02, feature_ref="Hole_F001"),
       QualityRequirement("PMI-02", "Depth", 10.0, -0.05, 0.05, feature_ref="Pocket_F010")]


def _report(seed, spec=SPEC):
    verdict = evaluate(generate_run(spec, derive_seed(seed, 0), IDS), _thresholds(seed))
    return verdict, compose_measurement_report(ORDER, PMI, verdict, {"SEG01": "Hole_F001", "SEG03": "Pocket_F010"})


def test_pass_report():
    verdict, sm = _report(42)
    assert verdict.overall
    assert validate(sm, QUALITY_CONTROL).ok
    reqs, results = parse_quality_report(sm)
    assert len(results) == len(IDS)
    assert [r.requirement_id for r in results][:3] == ["PMI-01", "REQ_FINGERPRINT", "PMI-02"]
    assert {r.requirement_id for r in results} <= {r.requirement_id for r in reqs}
    assert sm.value("ProductAasId") == ORDER.product_aas_id


def test_fail_report_is_still_valid():
    verdict, sm = _report(7, SPIKES)
    assert not verdict.overall
    assert validate(sm, QUALITY_CONTROL).ok
    _, results = parse_quality_report(sm)
    assert [r.passed for r in results] == [v.passed for v in verdict.segments]


def test_report_bytes_are_reproducible():
    assert canonical_serialize(_report(42)[1]) == canonical_serialize(_report(42)[1])


def test_verdict_dict_shape():
    d = QualityVerdict([]).to_dict()
    assert d == {"overall": True, "segments": []}

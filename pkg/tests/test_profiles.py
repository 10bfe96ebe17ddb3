from __future__ import annotations

import json

import pytest

from threshtune import (
    CostSchedule,
    LabelCost,
    OptimizerSettings,
    ThresholdProfile,
    confusion,
    decide,
    export_profile,
    make_baseline,
    optimize,
    parse_profile,
    profile_for,
    serialize_profile,
)
from threshtune.profiles import ProfileError, ProfileProvenance, utc_now_rfc3339

from helpers import make_dataset

_PROVENANCE = ProfileProvenance(
    dataset_digest="ab" * 32,
    settings=None,
    engine_version="0.1.0",
    created_at="2026-01-01T00:00:00Z",
)


def _minimal_profile() -> ThresholdProfile:
    return ThresholdProfile(thresholds={"a": 0.5}, default_threshold=0.5, task="multilabel")


def test_minimal_export_contains_canonical_shape():
    data = export_profile(_minimal_profile(), provenance=_PROVENANCE)
    payload = json.loads(data)
    assert payload["format_version"] == 1
    assert list(payload)[:8] == [
        "format_version", "task", "positive_label", "thresholds",
        "default_threshold", "costs", "baseline", "provenance",
    ]
    assert data.endswith(b"\n")


def test_label_keys_sorted():
    profile = ThresholdProfile(thresholds={"zz": 0.1, "aa": 0.9}, default_threshold=0.5, task="multilabel")
    data = export_profile(profile, provenance=_PROVENANCE)
    assert data.index(b'"aa"') < data.index(b'"zz"')


def test_export_is_byte_stable():
    assert export_profile(_minimal_profile(), provenance=_PROVENANCE) == export_profile(
        _minimal_profile(), provenance=_PROVENANCE
    )


def test_parse_round_trip_structural_equality():
    schedule = CostSchedule(per_label={"a": LabelCost(0.0, 3.0, 1.5)}, currency_tag="EUR")
    data = export_profile(_minimal_profile(), provenance=_PROVENANCE, costs=schedule)
    document = parse_profile(data)
    assert document.task.value == "multilabel"
    assert document.thresholds == {"a": 0.5}
    assert document.default_threshold == 0.5
    assert document.costs == schedule
    assert document.provenance == _PROVENANCE
    assert serialize_profile(document) == data


def test_serialization_idempotent_with_baseline(data_dir):
    data = (data_dir / "golden.threshy.json").read_bytes()
    once = serialize_profile(parse_profile(data))
    assert once == data
    assert serialize_profile(parse_profile(once)) == once


def test_golden_fixture_structure(data_dir):
    document = parse_profile((data_dir / "golden.threshy.json").read_bytes())
    assert document.task.value == "multiclass"
    assert document.thresholds == {"a": 0.5, "b": 0.5}
    assert document.baseline is not None
    counts = document.baseline.confusion.per_label
    assert (counts["a"].tp, counts["a"].fp, counts["a"].mp) == (1, 1, 1)
    assert (counts["b"].tp, counts["b"].fp, counts["b"].mp) == (1, 0, 1)
    assert document.baseline.total_cost == 4.0
    assert document.baseline.metrics.abstain_count == 1
    assert document.provenance.settings == OptimizerSettings(rng_seed=7)
    assert document.extra == {"note": "golden fixture"}


def test_unknown_fields_preserved():
    data = export_profile(_minimal_profile(), provenance=_PROVENANCE, extra={"x-client": {"retries": 3}})
    document = parse_profile(data)
    assert document.extra == {"x-client": {"retries": 3}}
    assert serialize_profile(document) == data


def test_unsupported_format_version():
    payload = json.loads(export_profile(_minimal_profile(), provenance=_PROVENANCE))
    payload["format_version"] = 2
    with pytest.raises(ProfileError, match=r"unsupported format_version 2.*supported versions: 1"):
        parse_profile(json.dumps(payload).encode())


def test_threshold_out_of_range_rejected():
    payload = json.loads(export_profile(_minimal_profile(), provenance=_PROVENANCE))
    payload["thresholds"]["a"] = 1.3
    with pytest.raises(ProfileError, match="out of range"):
        parse_profile(json.dumps(payload).encode())


def test_malformed_documents_rejected():
    with pytest.raises(ProfileError, match="not valid JSON"):
        parse_profile(b"{nope")
    with pytest.raises(ProfileError, match="JSON object"):
        parse_profile(b"[1, 2]")
    payload = json.loads(export_profile(_minimal_profile(), provenance=_PROVENANCE))
    del payload["thresholds"]
    with pytest.raises(ProfileError, match="missing required key"):
        parse_profile(json.dumps(payload).encode())


def test_binary_profile_requires_positive_label():
    payload = json.loads(export_profile(_minimal_profile(), provenance=_PROVENANCE))
    payload["task"] = "binary"
    with pytest.raises(ProfileError, match="positive_label"):
        parse_profile(json.dumps(payload).encode())


def test_bad_timestamp_rejected():
    payload = json.loads(export_profile(_minimal_profile(), provenance=_PROVENANCE))
    payload["provenance"]["created_at"] = "yesterday"
    with pytest.raises(ProfileError, match="RFC-3339"):
        parse_profile(json.dumps(payload).encode())


def test_utc_now_is_rfc3339():
    from threshtune.profiles import _RFC3339_RE

    assert _RFC3339_RE.match(utc_now_rfc3339())


def test_baseline_consistency_on_reapplication(spam_model_1):
    result = optimize(spam_model_1, OptimizerSettings(population_size=30, generations=30, rng_seed=1))
    solution = result.recommended
    profile = profile_for(spam_model_1, list(solution.thresholds))
    provenance = ProfileProvenance(
        dataset_digest=spam_model_1.content_digest,
        settings=OptimizerSettings(population_size=30, generations=30, rng_seed=1),
        created_at="2026-01-01T00:00:00Z",
    )
    document = parse_profile(export_profile(profile, provenance=provenance,
                                            baseline=make_baseline(spam_model_1, profile)))
    reapplied = confusion(spam_model_1, decide(spam_model_1, document.to_threshold_profile()))
    assert reapplied == document.baseline.confusion

"""Parser tests: happy paths, every error class with its line number, and
serialize/parse round-trips."""

from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classlens.analytics import build_dataset
from classlens.errors import (
    DuplicateClassId,
    DuplicateInstanceId,
    MalformedHeader,
    MalformedRow,
    NonFiniteValue,
    ProbabilityOutOfRange,
    RowArityMismatch,
    SumTolerance,
    TrueClassOutOfRange,
)
from classlens.ingest import (
    parse_image_manifest,
    parse_labels,
    parse_predictions,
    serialize_predictions,
)
from conftest import T6_ROWS, t6_records

T6_CSV = (
    "instance_id,true_class,p0,p1,p2\n"
    "i0,0,0.7,0.2,0.1\n"
    "i1,0,0.3,0.6,0.1\n"
    "i2,1,0.1,0.8,0.1\n"
    "i3,1,0.4,0.4,0.2\n"
    "i4,2,0.2,0.3,0.5\n"
    "i5,2,0.5,0.4,0.1\n"
)


class TestParsePredictions:
    def test_t6_round_trips_to_fixture(self):
        records = parse_predictions(T6_CSV)
        assert [(r.instance_id, r.true_class) for r in records] == [
            (iid, true) for iid, true, _ in T6_ROWS
        ]
        for r, (_, _, probs) in zip(records, T6_ROWS):
            assert r.probs.dtype == np.float32
            assert np.array_equal(r.probs, np.asarray(probs, dtype=np.float32))
        # and the built dataset matches the in-memory fixture exactly
        assert np.array_equal(
            build_dataset(records).probs, build_dataset(t6_records()).probs
        )

    def test_crlf_accepted(self):
        records = parse_predictions(T6_CSV.replace("\n", "\r\n"))
        assert len(records) == 6

    def test_bytes_and_stream_sources(self):
        assert len(parse_predictions(T6_CSV.encode())) == 6
        assert len(parse_predictions(io.StringIO(T6_CSV))) == 6

    def test_expected_k_mismatch(self):
        with pytest.raises(MalformedHeader):
            parse_predictions(T6_CSV, expected_k=5)

    def test_empty_file(self):
        with pytest.raises(MalformedHeader) as err:
            parse_predictions("")
        assert err.value.line == 1

    def test_bad_prob_column_name(self):
        bad = T6_CSV.replace("p1", "prob1")
        with pytest.raises(MalformedHeader):
            parse_predictions(bad)

    def test_row_arity(self):
        bad = "instance_id,true_class,p0,p1,p2\ni0,0,0.5,0.5\n"
        with pytest.raises(RowArityMismatch) as err:
            parse_predictions(bad)
        assert err.value.line == 2

    def test_non_finite(self):
        bad = "instance_id,true_class,p0,p1\ni0,0,nan,1.0\n"
        with pytest.raises(NonFiniteValue) as err:
            parse_predictions(bad)
        assert err.value.line == 2

    def test_unparseable_value(self):
        bad = "instance_id,true_class,p0,p1\ni0,0,zero,1.0\n"
        with pytest.raises(NonFiniteValue):
            parse_predictions(bad)

    def test_out_of_range(self):
        bad = "instance_id,true_class,p0,p1\ni0,0,-0.2,1.2\n"
        with pytest.raises(ProbabilityOutOfRange) as err:
            parse_predictions(bad)
        assert err.value.line == 2

    def test_sum_tolerance(self):
        bad = "instance_id,true_class,p0,p1\nok,1,0.5,0.5\ni0,0,0.5,0.4\n"
        with pytest.raises(SumTolerance) as err:
            parse_predictions(bad)
        assert err.value.line == 3
        assert err.value.total == pytest.approx(0.9)

    def test_sum_tolerance_configurable(self):
        loose = "instance_id,true_class,p0,p1\ni0,0,0.5,0.4\n"
        assert len(parse_predictions(loose, prob_sum_tolerance=0.2)) == 1

    def test_duplicate_id(self):
        bad = "instance_id,true_class,p0,p1\nx,0,1,0\nx,1,0,1\n"
        with pytest.raises(DuplicateInstanceId) as err:
            parse_predictions(bad)
        assert err.value.instance_id == "x"
        assert err.value.line == 3

    def test_true_class_out_of_range(self):
        bad = "instance_id,true_class,p0,p1\ni0,2,1,0\n"
        with pytest.raises(TrueClassOutOfRange) as err:
            parse_predictions(bad)
        assert err.value.line == 2

    def test_true_class_not_integer(self):
        bad = "instance_id,true_class,p0,p1\ni0,zero,1,0\n"
        with pytest.raises(TrueClassOutOfRange):
            parse_predictions(bad)

    def test_first_error_in_stream_order_wins(self):
        bad = (
            "instance_id,true_class,p0,p1\n"
            "a,0,0.5,0.5\n"
            "b,0,0.5,0.2\n"  # sum failure on line 3
            "c,9,0.5,0.5\n"  # would be a true-class failure on line 4
        )
        with pytest.raises(SumTolerance) as err:
            parse_predictions(bad)
        assert err.value.line == 3


class TestSerializeRoundTrip:
    def test_t6(self):
        buf = io.StringIO()
        serialize_predictions(parse_predictions(T6_CSV), buf)
        again = parse_predictions(buf.getvalue())
        for a, b in zip(parse_predictions(T6_CSV), again):
            assert a.instance_id == b.instance_id
            assert a.true_class == b.true_class
            assert np.array_equal(a.probs, b.probs)

    @given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(1, 40))
    @settings(max_examples=30, deadline=None)
    def test_random_records_round_trip_exactly(self, seed, k, n):
        rng = np.random.default_rng(seed)
        from classlens.analytics import PredictionRecord

        records = []
        for i in range(n):
            v = rng.random(k) + 1e-3
            v /= v.sum()
            records.append(PredictionRecord(f"r{i}", int(rng.integers(0, k)), v.astype(np.float32)))
        buf = io.StringIO()
        serialize_predictions(records, buf)
        parsed = parse_predictions(buf.getvalue())
        for a, b in zip(records, parsed):
            assert a.instance_id == b.instance_id
            assert a.true_class == b.true_class
            assert np.array_equal(np.asarray(a.probs, dtype=np.float32), b.probs)

    def test_unsafe_id_rejected(self):
        from classlens.analytics import PredictionRecord

        bad = PredictionRecord("a,b", 0, np.asarray([1.0, 0.0], dtype=np.float32))
        with pytest.raises(ValueError):
            serialize_predictions([bad], io.StringIO())


class TestParseLabels:
    def test_hierarchy_split(self):
        out = parse_labels("class_id,label,hierarchy\n207,golden retriever,animal/canine/dog\n")
        assert out == [
            type(out[0])(207, "golden retriever", ("animal", "canine", "dog"))
        ]

    def test_empty_hierarchy(self):
        out = parse_labels("class_id,label,hierarchy\n3,oak,\n")
        assert out[0].hierarchy == ()

    def test_duplicate_class_id(self):
        bad = "class_id,label,hierarchy\n5,a,\n5,b,\n"
        with pytest.raises(DuplicateClassId) as err:
            parse_labels(bad)
        assert err.value.class_id == 5
        assert err.value.line == 3

    def test_malformed_row(self):
        with pytest.raises(MalformedRow) as err:
            parse_labels("class_id,label,hierarchy\n1,only-two\n")
        assert err.value.line == 2

    def test_empty_file_is_empty_table(self):
        assert parse_labels("") == []


class TestParseImageManifest:
    def test_single_row(self):
        out = parse_image_manifest("instance_id,image_url\ni2,https://host/x.jpg\n")
        assert out == {"i2": "https://host/x.jpg"}

    def test_url_with_commas_is_kept_whole(self):
        out = parse_image_manifest("instance_id,image_url\ni1,https://h/x?a=1,2,3\n")
        assert out == {"i1": "https://h/x?a=1,2,3"}

    def test_empty_file(self):
        assert parse_image_manifest("") == {}

    def test_duplicate_id(self):
        bad = "instance_id,image_url\na,u1\na,u2\n"
        with pytest.raises(DuplicateInstanceId) as err:
            parse_image_manifest(bad)
        assert err.value.line == 3

    def test_malformed_row(self):
        with pytest.raises(MalformedRow):
            parse_image_manifest("instance_id,image_url\nno-url-here\n")

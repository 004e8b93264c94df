"""Manifest types, canonical serialization, and strict loading."""

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figalign.corpus import (
    STATUS_FALLBACK,
    STATUS_SINGLETON,
    STATUS_UNIQUE_LABEL,
    AlignedPair,
    BoundingBox,
    CorpusManifest,
    FigureRecord,
    load_manifest,
    manifest_to_lines,
    save_manifest,
    validate_record,
)
from figalign.errors import (
    DanglingReference,
    DuplicateId,
    MalformedLine,
    MissingFile,
)
from helpers import random_manifest

DATA = Path(__file__).parent / "data"


def small_manifest() -> CorpusManifest:
    records = [
        FigureRecord("f2", "imgs/f2.png", "Coronal view.", journal="Brain Res"),
        FigureRecord("f1", "imgs/f1.png", "(a) CT. (b) MRI.", year=2001),
    ]
    pairs = [
        AlignedPair("f1#1", "f1", "MRI.", STATUS_UNIQUE_LABEL, BoundingBox(60, 0, 50, 40), "b"),
        AlignedPair("f1#0", "f1", "CT.", STATUS_UNIQUE_LABEL, BoundingBox(0, 0, 50, 40), "a"),
        AlignedPair("f2#0", "f2", "Coronal view.", STATUS_SINGLETON),
    ]
    return CorpusManifest.build(records, pairs)


class TestBoundingBox:
    def test_valid(self):
        box = BoundingBox(0, 0, 10, 5)
        assert box.area == 50
        assert box.center == (5.0, 2.5)

    @pytest.mark.parametrize("x,y,w,h", [(0, 0, 0, 5), (0, 0, 5, 0), (-1, 0, 5, 5), (0, -2, 5, 5)])
    def test_invalid(self, x, y, w, h):
        with pytest.raises(ValueError):
            BoundingBox(x, y, w, h)

    def test_iou(self):
        a = BoundingBox(0, 0, 10, 10)
        assert a.iou(BoundingBox(0, 0, 10, 10)) == 1.0
        assert a.iou(BoundingBox(20, 20, 5, 5)) == 0.0
        assert a.iou(BoundingBox(5, 0, 10, 10)) == pytest.approx(50 / 150)

    def test_contains_point_half_open(self):
        box = BoundingBox(2, 3, 4, 5)
        assert box.contains_point(2, 3)
        assert box.contains_point(5.9, 7.9)
        assert not box.contains_point(6, 3)
        assert not box.contains_point(2, 8)


class TestValidateRecord:
    def test_well_formed(self):
        assert validate_record(FigureRecord("f1", "a.png", "Axial view.")) == []

    def test_blank_caption_names_field(self):
        violations = validate_record(FigureRecord("f1", "a.png", "   "))
        assert len(violations) == 1
        assert "caption" in violations[0]

    def test_two_violations(self):
        violations = validate_record(FigureRecord("", "a.png", ""))
        assert len(violations) == 2


class TestRoundTrip:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        manifest = load_manifest(path)
        assert manifest.records == [] and manifest.pairs == []

    def test_save_load_identity(self, tmp_path):
        manifest = small_manifest()
        path = tmp_path / "m.jsonl"
        save_manifest(manifest, path)
        assert load_manifest(path) == manifest

    def test_records_only_line_count(self, tmp_path):
        records = [FigureRecord(f"f{i}", f"{i}.png", "Axial view.") for i in range(3)]
        manifest = CorpusManifest.build(records, [])
        path = tmp_path / "m.jsonl"
        save_manifest(manifest, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert all(json.loads(line)["kind"] == "record" for line in lines)

    def test_save_twice_byte_identical(self, tmp_path):
        manifest = small_manifest()
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_manifest(manifest, a)
        save_manifest(manifest, b)
        assert a.read_bytes() == b.read_bytes()

    def test_insertion_order_does_not_matter(self):
        manifest = small_manifest()
        rng = random.Random(3)
        for _ in range(5):
            records = list(manifest.records)
            pairs = list(manifest.pairs)
            rng.shuffle(records)
            rng.shuffle(pairs)
            shuffled = CorpusManifest.build(records, pairs)
            assert manifest_to_lines(shuffled) == manifest_to_lines(manifest)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "m.jsonl"
        body = manifest_to_lines(small_manifest())
        path.write_text("\n" + body[0] + "\n\n" + "\n".join(body[1:]) + "\n")
        assert load_manifest(path) == small_manifest()

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_manifest(tmp_path / "nope.jsonl")

    def test_seeded_random_round_trips(self, tmp_path):
        rng = random.Random(7)
        for i in range(25):
            manifest = random_manifest(rng)
            path = tmp_path / f"m{i}.jsonl"
            save_manifest(manifest, path)
            assert load_manifest(path) == manifest


class TestCanonicalOrdering:
    def test_records_sorted_by_figure_id(self):
        ids = [r.figure_id for r in small_manifest().records]
        assert ids == sorted(ids)

    def test_pairs_sorted_region_absent_first_then_xy(self):
        manifest = small_manifest()
        f1_pairs = [p for p in manifest.pairs if p.figure_id == "f1"]
        assert [p.pair_id for p in f1_pairs] == ["f1#0", "f1#1"]
        # the singleton of f2 has no region and still groups under its figure
        assert [p.figure_id for p in manifest.pairs] == ["f1", "f1", "f2"]

    def test_region_absent_sorts_before_boxes(self):
        records = [FigureRecord("f1", "a.png", "Caption text.")]
        pairs = [
            AlignedPair("f1#1", "f1", "Caption text.", STATUS_FALLBACK, BoundingBox(0, 0, 5, 5)),
            AlignedPair("f1#0", "f1", "Caption text.", STATUS_SINGLETON),
        ]
        manifest = CorpusManifest.build(records, pairs)
        assert [p.pair_id for p in manifest.pairs] == ["f1#0", "f1#1"]


class TestBuildValidation:
    def test_duplicate_record_id(self):
        records = [FigureRecord("f1", "a.png", "One."), FigureRecord("f1", "b.png", "Two.")]
        with pytest.raises(DuplicateId):
            CorpusManifest.build(records, [])

    def test_dangling_pair(self):
        pair = AlignedPair("f9#0", "f9", "Text.", STATUS_SINGLETON)
        with pytest.raises(DanglingReference):
            CorpusManifest.build([], [pair])

    def test_bad_pair_shape(self):
        record = FigureRecord("f1", "a.png", "One.")
        bad = AlignedPair("f1#0", "f1", "One.", STATUS_UNIQUE_LABEL, BoundingBox(0, 0, 5, 5))
        with pytest.raises(ValueError, match="label"):
            CorpusManifest.build([record], [bad])


MALFORMED_CASES = [
    ("bad_json.jsonl", MalformedLine, 2),
    ("not_object.jsonl", MalformedLine, 1),
    ("unknown_kind.jsonl", MalformedLine, 2),
    ("missing_field.jsonl", MalformedLine, 1),
    ("unknown_field.jsonl", MalformedLine, 1),
    ("bad_year_type.jsonl", MalformedLine, 1),
    ("bool_year.jsonl", MalformedLine, 1),
    ("blank_caption.jsonl", MalformedLine, 1),
    ("dup_record.jsonl", DuplicateId, 3),
    ("dup_pair.jsonl", DuplicateId, 3),
    ("dangling_pair.jsonl", DanglingReference, 2),
    ("bad_bbox_zero_w.jsonl", MalformedLine, 2),
    ("bbox_not_list.jsonl", MalformedLine, 2),
    ("bad_status.jsonl", MalformedLine, 2),
    ("singleton_with_region.jsonl", MalformedLine, 2),
    ("unique_without_label.jsonl", MalformedLine, 2),
    ("fallback_with_label.jsonl", MalformedLine, 2),
    ("uppercase_label.jsonl", MalformedLine, 2),
]


@pytest.mark.parametrize("name,error,line_no", MALFORMED_CASES)
def test_malformed_fixture_rejected(name, error, line_no):
    with pytest.raises(error) as excinfo:
        load_manifest(DATA / "malformed" / name)
    assert excinfo.value.line_no == line_no


records_strategy = st.builds(
    FigureRecord,
    figure_id=st.uuids().map(str),
    image_path=st.text(min_size=1, max_size=20).filter(lambda s: s.strip()),
    caption=st.text(min_size=1, max_size=60).filter(lambda s: s.strip()),
    journal=st.none() | st.text(max_size=15),
    year=st.none() | st.integers(min_value=1800, max_value=2100),
    article_type=st.none() | st.sampled_from(["case report", "review"]),
)


@given(records=st.lists(records_strategy, max_size=8, unique_by=lambda r: r.figure_id))
@settings(max_examples=60, deadline=None)
def test_property_record_round_trip(tmp_path_factory, records):
    manifest = CorpusManifest.build(records, [])
    path = tmp_path_factory.mktemp("rt") / "m.jsonl"
    save_manifest(manifest, path)
    assert load_manifest(path) == manifest

import json

import pytest

from annexport.exporter import ExporterConfig, RecordError, export, main, map_record, resolve_path

ELQ_STYLE_CONFIG = {
    "id_field": "query_id",
    "entities_field": "predictions",
    "fields": {
        "mention": "mention_text",
        "entity": "entity_title",
        "score": "confidence",
        "start": "span.0",
        "end": "span.1",
    },
    "window": {"window_tokens": 128, "overlap_tokens": 42},
}


def make_record(rid="q1", entities=None):
    return {"query_id": rid, "predictions": entities if entities is not None else []}


def make_entity(start=0, end=5, title="Entity A", score=7.5, mention="hello"):
    return {"mention_text": mention, "entity_title": title, "confidence": score,
            "span": [start, end]}


@pytest.fixture()
def config():
    return ExporterConfig(**ELQ_STYLE_CONFIG)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def test_resolve_path_nested_and_lists():
    record = {"a": {"b": [10, {"c": "x"}]}}
    assert resolve_path(record, "a.b.0") == 10
    assert resolve_path(record, "a.b.1.c") == "x"
    with pytest.raises(RecordError):
        resolve_path(record, "a.missing")
    with pytest.raises(RecordError):
        resolve_path(record, "a.b.9")


def test_map_record_two_entities(config):
    record = make_record(entities=[make_entity(), make_entity(start=10, end=14, title="B")])
    mapped = map_record(record, config, None)
    assert mapped["id"] == "q1"
    assert len(mapped["entities"]) == 2
    assert mapped["entities"][0] == {
        "mention": "hello", "start": 0, "end": 5, "entity": "Entity A", "score": 7.5,
    }


def test_map_record_rejects_inverted_span(config):
    record = make_record(entities=[make_entity(start=9, end=3)])
    with pytest.raises(RecordError, match="span"):
        map_record(record, config, None)


def test_map_record_rejects_missing_field(config):
    entity = make_entity()
    del entity["entity_title"]
    with pytest.raises(RecordError, match="entity_title"):
        map_record(make_record(entities=[entity]), config, None)


def test_map_record_validates_against_texts(config):
    record = make_record(entities=[make_entity(start=0, end=50)])
    with pytest.raises(RecordError, match="past text length"):
        map_record(record, config, {"q1": "short text"})
    mapped = map_record(make_record(entities=[make_entity(0, 5)]), config, {"q1": "short text"})
    assert mapped["entities"][0]["end"] == 5


def test_export_counts_and_sidecar(tmp_path, config):
    records = [
        make_record("q1", [make_entity()]),
        make_record("q2", [make_entity(start=3, end=1)]),  # unmappable
        make_record("q3", []),
    ]
    native = tmp_path / "native.jsonl"
    write_jsonl(native, records)
    out = tmp_path / "out.jsonl"
    exported, failed = export(native, config, out)
    assert (exported, failed) == (2, 1)
    errors = [json.loads(line) for line in (tmp_path / "out.errors.jsonl").read_text().splitlines()]
    assert errors[0]["line"] == 2
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert [rec["id"] for rec in lines] == ["q1", "q3"]


def test_export_empty_input(tmp_path, config):
    native = tmp_path / "native.jsonl"
    native.write_text("")
    out = tmp_path / "out.jsonl"
    exported, failed = export(native, config, out)
    assert (exported, failed) == (0, 0)
    assert out.read_text() == ""
    assert not (tmp_path / "out.errors.jsonl").exists()


def test_export_duplicate_id_routed_to_sidecar(tmp_path, config):
    native = tmp_path / "native.jsonl"
    write_jsonl(native, [make_record("q1"), make_record("q1")])
    out = tmp_path / "out.jsonl"
    exported, failed = export(native, config, out)
    assert (exported, failed) == (1, 1)


def test_export_records_config_in_meta(tmp_path, config):
    native = tmp_path / "native.jsonl"
    write_jsonl(native, [make_record()])
    out = tmp_path / "out.jsonl"
    export(native, config, out)
    meta = json.loads((tmp_path / "out.jsonl.meta.json").read_text())
    assert meta["exporter"]["window"] == {"window_tokens": 128, "overlap_tokens": 42}
    assert meta["exporter"]["fields"]["start"] == "span.0"


def test_export_is_deterministic(tmp_path, config):
    native = tmp_path / "native.jsonl"
    write_jsonl(native, [make_record("q1", [make_entity()]), make_record("q2")])
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    export(native, config, out1)
    export(native, config, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_output_matches_annotation_schema(tmp_path, config):
    # schema conformance checked without importing the retrieval toolkit
    native = tmp_path / "native.jsonl"
    write_jsonl(native, [make_record("q1", [make_entity()])])
    out = tmp_path / "out.jsonl"
    export(native, config, out)
    for line in out.read_text().splitlines():
        record = json.loads(line)
        assert set(record) == {"id", "entities"}
        assert isinstance(record["id"], str) and record["id"]
        for entity in record["entities"]:
            assert set(entity) == {"mention", "start", "end", "entity", "score"}
            assert isinstance(entity["start"], int) and isinstance(entity["end"], int)
            assert 0 <= entity["start"] < entity["end"]
            assert isinstance(entity["entity"], str) and entity["entity"]
            assert isinstance(entity["score"], float)


def test_main_exit_codes(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(ELQ_STYLE_CONFIG))
    native = tmp_path / "native.jsonl"
    write_jsonl(native, [make_record("q1", [make_entity()])])
    out = tmp_path / "out.jsonl"
    assert main(["--input", str(native), "--config", str(config_path), "--out", str(out)]) == 0

    write_jsonl(native, [make_record("q1", [make_entity(start=5, end=2)])])
    assert main(["--input", str(native), "--config", str(config_path), "--out", str(out)]) == 1

    assert main(["--input", str(tmp_path / "missing.jsonl"), "--config", str(config_path),
                 "--out", str(out)]) == 2


def test_config_rejects_missing_field_paths():
    broken = dict(ELQ_STYLE_CONFIG, fields={"mention": "m"})
    with pytest.raises(ValueError, match="missing field paths"):
        ExporterConfig(**broken)

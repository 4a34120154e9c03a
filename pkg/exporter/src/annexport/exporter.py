"""Convert native entity-linker output into retrieval-toolkit annotation JSONL.

Neural linkers (ELQ-style) emit one JSON record per text with model-specific
field names. This script maps them onto the flat annotation schema

    {"id": str, "entities": [{"mention": str, "start": int, "end": int,
                              "entity": str, "score": number}, ...]}

one line per text id. Records that cannot be mapped are listed in an errors
sidecar (`<out>.errors.jsonl`) and force a nonzero exit; well-formed records
are still exported. The exporter configuration, including the sliding-window
parameters the linker ran with, is recorded in `<out>.meta.json` for
provenance.

Standalone by design: the annotation JSONL file is the only coupling to the
retrieval toolkit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path


class RecordError(ValueError):
    """A native record cannot be mapped onto the annotation schema."""


@dataclass(frozen=True)
class ExporterConfig:
    """Field mapping from the native records to the annotation schema.

    Field paths are dot-separated; integer components index into lists
    (e.g. "span.0"). The window section mirrors the parameters the linker
    was run with and is recorded with the output.
    """

    id_field: str = "id"
    entities_field: str = "entities"
    fields: dict = field(
        default_factory=lambda: {
            "mention": "mention",
            "entity": "entity",
            "score": "score",
            "start": "start",
            "end": "end",
        }
    )
    format: str = "jsonl"
    window: dict = field(default_factory=dict)
    linker: dict = field(default_factory=dict)

    REQUIRED_FIELDS = ("mention", "entity", "score", "start", "end")

    def __post_init__(self):
        missing = [name for name in self.REQUIRED_FIELDS if name not in self.fields]
        if missing:
            raise ValueError(f"exporter config is missing field paths: {missing}")

    @classmethod
    def load(cls, path: str | Path) -> "ExporterConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {"id_field", "entities_field", "fields", "format", "window", "linker"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "id_field": self.id_field,
            "entities_field": self.entities_field,
            "fields": dict(self.fields),
            "window": dict(self.window),
            "linker": dict(self.linker),
        }


def resolve_path(record, path: str):
    """Walk a dotted field path; integer components index lists."""
    value = record
    for part in path.split("."):
        if isinstance(value, dict):
            if part not in value:
                raise RecordError(f"field path {path!r}: missing key {part!r}")
            value = value[part]
        elif isinstance(value, list):
            try:
                value = value[int(part)]
            except (ValueError, IndexError):
                raise RecordError(f"field path {path!r}: bad list index {part!r}") from None
        else:
            raise RecordError(f"field path {path!r}: cannot descend into {type(value).__name__}")
    return value


def map_record(record, config: ExporterConfig, texts: dict[str, str] | None) -> dict:
    """Map one native record to an annotation line, or raise RecordError."""
    text_id = resolve_path(record, config.id_field)
    if not isinstance(text_id, str) or not text_id:
        raise RecordError(f"id field {config.id_field!r} is not a non-empty string")
    raw_entities = resolve_path(record, config.entities_field)
    if not isinstance(raw_entities, list):
        raise RecordError(f"entities field {config.entities_field!r} is not a list")

    entities = []
    for i, raw in enumerate(raw_entities):
        values = {}
        for name in ExporterConfig.REQUIRED_FIELDS:
            values[name] = resolve_path(raw, config.fields[name])
        mention, entity = values["mention"], values["entity"]
        score, start, end = values["score"], values["start"], values["end"]
        if not isinstance(mention, str):
            raise RecordError(f"entity {i}: mention is not a string")
        if not isinstance(entity, str) or not entity:
            raise RecordError(f"entity {i}: entity name is not a non-empty string")
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise RecordError(f"entity {i}: score {score!r} is not a number")
        for label, value in (("start", start), ("end", end)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise RecordError(f"entity {i}: {label} {value!r} is not an integer")
        if start < 0 or end <= start:
            raise RecordError(f"entity {i}: bad span [{start}, {end})")
        if texts is not None:
            if text_id not in texts:
                raise RecordError(f"id {text_id!r} not present in the source texts")
            if end > len(texts[text_id]):
                raise RecordError(
                    f"entity {i}: span ends at {end}, past text length {len(texts[text_id])}"
                )
        entities.append(
            {"mention": mention, "start": start, "end": end,
             "entity": entity, "score": float(score)}
        )
    return {"id": text_id, "entities": entities}


def load_texts(path: str | Path) -> dict[str, str]:
    """Source texts as `id<TAB>text` TSV, for offset validation."""
    texts: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated fields")
            texts[fields[0]] = fields[1]
    return texts


def export(
    input_path: str | Path,
    config: ExporterConfig,
    out_path: str | Path,
    texts: dict[str, str] | None = None,
) -> tuple[int, int]:
    """Stream native JSONL to annotation JSONL. Returns (exported, errors)."""
    if config.format != "jsonl":
        raise ValueError(f"unsupported input format {config.format!r}")
    out_path = Path(out_path)
    errors_path = out_path.with_name(out_path.stem + ".errors.jsonl")
    exported = 0
    failed = 0
    seen_ids: set[str] = set()
    with open(input_path, encoding="utf-8") as fin, \
            open(out_path, "w", encoding="utf-8", newline="\n") as fout, \
            open(errors_path, "w", encoding="utf-8", newline="\n") as ferr:
        for lineno, raw in enumerate(fin, 1):
            if not raw.strip():
                continue
            try:
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise RecordError(f"invalid JSON: {exc.msg}") from None
                mapped = map_record(record, config, texts)
                if mapped["id"] in seen_ids:
                    raise RecordError(f"duplicate id {mapped['id']!r}")
                seen_ids.add(mapped["id"])
            except RecordError as exc:
                failed += 1
                ferr.write(json.dumps({"line": lineno, "error": str(exc)}) + "\n")
                continue
            fout.write(json.dumps(mapped, ensure_ascii=False) + "\n")
            exported += 1
    if failed == 0:
        errors_path.unlink()
    Path(str(out_path) + ".meta.json").write_text(
        json.dumps({"exporter": config.to_dict(), "input": str(input_path)},
                   indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return exported, failed


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="annexport",
        description="Convert native entity-linker output into annotation JSONL.",
    )
    parser.add_argument("--input", required=True, help="native linker output (JSONL)")
    parser.add_argument("--config", required=True, help="exporter config JSON")
    parser.add_argument("--out", required=True, help="output annotation JSONL")
    parser.add_argument("--texts", help="optional id<TAB>text TSV to validate offsets against")
    args = parser.parse_args(argv)
    try:
        config = ExporterConfig.load(args.config)
        texts = load_texts(args.texts) if args.texts else None
        exported, failed = export(args.input, config, args.out, texts)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"exported {exported} record(s), {failed} error(s)", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

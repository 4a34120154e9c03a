"""Standalone exporter from native entity-linker output to annotation JSONL."""

from .exporter import ExporterConfig, export, map_record, resolve_path

__version__ = "0.1.0"

"""Metadata comment headers shared by every CSV emitter.

Conventions (log base, s0 convention, risk factor, generators) travel with
the data as `# metadata: key=value` lines before the CSV header.
"""

from __future__ import annotations


def format_metadata(metadata: dict[str, str]) -> list[str]:
    return [f"# metadata: {k}={v}" for k, v in sorted(metadata.items())]


def split_metadata(lines) -> tuple[dict[str, str], list[str]]:
    """Separate comment lines from data lines, parsing metadata entries."""
    meta: dict[str, str] = {}
    rows: list[str] = []
    for line in lines:
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if body.startswith("metadata:"):
                kv = body[len("metadata:"):].strip()
                key, _, value = kv.partition("=")
                meta[key.strip()] = value.strip()
            continue
        rows.append(s)
    return meta, rows

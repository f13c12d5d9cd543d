"""Shared helpers for the dataset import scripts."""

import csv
import json
from pathlib import Path


def escape_cell(text):
    return (text.replace("\\", "\\\\").replace("|", "\\|")
            .replace("\n", "\\n").replace("\t", "\\t").strip())


def csv_to_linearized(path, title=""):
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty table")
    lines = []
    if title:
        lines.append("title | " + escape_cell(title))
    lines.extend(" | ".join(escape_cell(c) for c in r) for r in rows)
    return "\n".join(lines)


def read_text(path):
    return Path(path).read_text(encoding="utf-8").strip()


def write_jsonl(records, out):
    with open(out, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")

#!/usr/bin/env python3
"""Convert a Chart-to-Text style directory into dataset JSONL.

Layout (one file per chart, matched by stem):
    <root>/data/<id>.csv       gold table, first row is the header
    <root>/titles/<id>.txt     chart title
    <root>/captions/<id>.txt   reference summary
    <root>/derendered/<id>.csv optional de-rendered table
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from _common import csv_to_linearized, read_text, write_jsonl  # noqa: E402


def convert(root, source):
    root = Path(root)
    records = []
    for table_path in sorted((root / "data").glob("*.csv")):
        stem = table_path.stem
        title_path = root / "titles" / f"{stem}.txt"
        title = read_text(title_path) if title_path.exists() else ""
        rec = {
            "id": f"{source}-{stem}",
            "title": title,
            "table": csv_to_linearized(table_path, title),
            "candidate_summaries": [],
            "source": source,
        }
        caption = root / "captions" / f"{stem}.txt"
        if caption.exists():
            rec["reference_summary"] = read_text(caption)
        derendered = root / "derendered" / f"{stem}.csv"
        if derendered.exists():
            rec["derendered_table"] = csv_to_linearized(derendered, title)
        records.append(rec)
    return records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("root")
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--source", choices=["statista", "pew"], default="statista")
    args = ap.parse_args(argv)
    records = convert(args.root, args.source)
    if not records:
        ap.error(f"no tables under {args.root}/data")
    write_jsonl(records, args.output)
    print(f"wrote {len(records)} records to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

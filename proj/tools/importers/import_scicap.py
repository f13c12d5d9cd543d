#!/usr/bin/env python3
"""Convert a SciCap style directory into dataset JSONL.

SciCap ships figures and captions only, so tables come from an external
de-rendering step:
    <root>/captions/<figure-id>.json  SciCap caption record
    <root>/tables/<figure-id>.csv     table recovered from the figure

The caption is "2-normalized"/"2-1-basic-num"/"caption" when present, else
"0-originally-extracted". The recovered table is stored as the gold table.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from _common import csv_to_linearized, write_jsonl  # noqa: E402


def caption_of(meta):
    normalized = meta.get("2-normalized", {}).get("2-1-basic-num", {}).get("caption")
    return (normalized or meta.get("0-originally-extracted", "")).strip()


def convert(root):
    root = Path(root)
    records = []
    for meta_path in sorted((root / "captions").glob("*.json")):
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        fig = meta.get("figure-ID", meta_path.stem)
        stem = Path(fig).stem
        table_path = root / "tables" / f"{stem}.csv"
        if not table_path.exists():
            print(f"skipping {fig}: no table at {table_path}", file=sys.stderr)
            continue
        title = meta.get("title", "")
        rec = {
            "id": f"scicap-{stem}",
            "title": title,
            "table": csv_to_linearized(table_path, title),
            "candidate_summaries": [],
            "source": "scicap",
        }
        caption = caption_of(meta)
        if caption:
            rec["reference_summary"] = caption
        if "image" in meta:
            rec["image_url"] = meta["image"]
        records.append(rec)
    return records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("root")
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args(argv)
    records = convert(args.root)
    if not records:
        ap.error(f"no captions with tables under {args.root}")
    write_jsonl(records, args.output)
    print(f"wrote {len(records)} records to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

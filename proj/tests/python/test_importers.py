import subprocess
import sys
from pathlib import Path

import chats

ROOT = Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
TOOLS = ROOT / "tools" / "importers"


def run_import(script, src, out, *extra):
    subprocess.run([sys.executable, str(TOOLS / script), str(src), "-o", str(out), *extra], check=True,
                   capture_output=True)
    return chats.load_dataset(out)


def test_chart_to_text(tmp_path):
    examples, errors = run_import("import_chart_to_text.py", DATA / "chart_to_text", tmp_path / "c2t.jsonl")
    assert errors == []
    assert [e.id for e in examples] == [f"statista-100{i}" for i in range(1, 6)]
    first = examples[0]
    assert first.table.headers == ["Year", "Revenue in million U.S. dollars"]
    assert first.table.title == first.title
    assert first.derendered_table is not None and first.derendered_table != first.table
    assert all(e.reference_summary for e in examples)
    assert examples[1].table.rows[2] == ["Italy", "41%"]
    critic = chats.Critic.oracle()
    scored = critic.score(examples[1].reference_summary, examples[1].table)
    assert scored.faithfulness == 1.0


def test_pew_source_flag(tmp_path):
    examples, _ = run_import("import_chart_to_text.py", DATA / "chart_to_text", tmp_path / "pew.jsonl",
                             "--source", "pew")
    assert {e.source for e in examples} == {"pew"}


def test_scicap(tmp_path):
    examples, errors = run_import("import_scicap.py", DATA / "scicap", tmp_path / "scicap.jsonl")
    assert errors == [] and len(examples) == 5
    assert {e.source for e in examples} == {"scicap"}
    e = examples[0]
    assert e.reference_summary.endswith("The highest value is 81.2.")
    assert chats.oracle_check("The highest value is 81.2.", e.table)["score"] == 1.0

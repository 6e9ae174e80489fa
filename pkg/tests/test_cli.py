import json
import subprocess
import sys
from pathlib import Path

from blocktalk.world import BlockColor, VoxelWorld

from .conftest import GOLDEN_DESCRIPTION

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "fifteen_blocks.world"


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "blocktalk.cli", *args],
        capture_output=True, text=True, timeout=300,
    )
    return proc.returncode, proc.stdout, proc.stderr


class TestCLI:
    def test_verbalize_golden_fixture(self):
        code, out, _ = run_cli(["verbalize", "--world", str(FIXTURE)])
        assert code == 0
        assert out.strip() == GOLDEN_DESCRIPTION

    def test_state_line(self):
        code, out, _ = run_cli(["verbalize", "--world", str(FIXTURE), "--state-line", "--seed", "3"])
        assert code == 0
        assert out.startswith("state: There ")

    def test_classify_structure(self):
        code, out, _ = run_cli(["classify-structure", "--world", str(FIXTURE), "--format", "json-lines"])
        assert code == 0
        labels = json.loads(out)
        assert set(labels) == {"flat", "flying", "diagonal", "tricky", "tall"}

    def test_match_self(self):
        code, out, _ = run_cli(["match", "--world", str(FIXTURE), "--target", str(FIXTURE),
                                "--format", "json-lines"])
        assert code == 0
        assert json.loads(out)["exact"] is True

    def test_unknown_flag_exits_2(self):
        code, _, _ = run_cli(["verbalize", "--world", str(FIXTURE), "--bogus"])
        assert code == 2

    def test_unknown_subcommand_exits_2(self):
        code, _, _ = run_cli(["frobnicate"])
        assert code == 2

    def test_missing_file_exits_1(self):
        code, _, err = run_cli(["verbalize", "--world", "/nonexistent/file.world"])
        assert code == 1
        assert "error" in err.lower()

    def test_synth_then_stats_and_clean(self, tmp_path):
        out_dir = tmp_path / "synth"
        code, out, _ = run_cli(["synth", "--out", str(out_dir), "--n", "50", "--worlds", "4",
                                "--seed", "3", "--format", "json-lines"])
        assert code == 0
        assert json.loads(out)["records"] == 50
        assert (out_dir / "single.jsonl").exists()
        assert (out_dir / "meta.json").exists()

        code, out, _ = run_cli(["dataset", "stats", "--input", str(out_dir / "single.jsonl"),
                                "--kind", "single", "--format", "json-lines"])
        assert code == 0
        stats = json.loads(out)
        assert stats["instructions"] == 50

        code, out, _ = run_cli(["dataset", "clean", "--input", str(out_dir / "single.jsonl"),
                                "--kind", "single", "--out", str(tmp_path / "kept.jsonl"),
                                "--format", "json-lines"])
        assert code == 0

    def test_stats_report_writes_figures(self, tmp_path):
        out_dir = tmp_path / "synth"
        run_cli(["synth", "--out", str(out_dir), "--n", "40", "--worlds", "4", "--seed", "5"])
        report_dir = tmp_path / "report"
        code, _, _ = run_cli(["dataset", "stats", "--input", str(out_dir / "single.jsonl"),
                              "--kind", "single", "--report-dir", str(report_dir)])
        assert code == 0
        assert (report_dir / "stats.tsv").exists()
        assert (report_dir / "instruction_lengths.png").exists()
        assert (report_dir / "label_balance.png").exists()
        header = (report_dir / "stats.tsv").read_text().splitlines()[0]
        assert header == "field\tvalue"

    def test_rank_reports_mrr_and_figures(self, tmp_path):
        report_dir = tmp_path / "rank-report"
        code, out, _ = run_cli(["clarify", "rank", "--method", "bm25", "--k", "20",
                                "--n", "80", "--report-dir", str(report_dir),
                                "--format", "json-lines"])
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "bm25"
        assert 0.0 <= payload["mrr"] <= 1.0
        assert (report_dir / "ranking.tsv").exists()
        assert (report_dir / "gold_ranks.png").exists()

    def test_replay_roundtrip(self, tmp_path):
        from blocktalk.world import ActionLog, AgentState, Place, Position

        log = ActionLog(VoxelWorld(), AgentState())
        log.append(Place(Position(5, 0, 6), BlockColor.GREEN, 5))
        log_path = tmp_path / "log.jsonl"
        log_path.write_text(log.to_jsonl())
        out_path = tmp_path / "final.world"
        code, out, _ = run_cli(["replay", "--log", str(log_path), "--out", str(out_path),
                                "--format", "json-lines"])
        assert code == 0
        assert json.loads(out)["blocks"] == 1
        assert out_path.exists()

    def test_need_train_eval_cycle(self, tmp_path):
        out_dir = tmp_path / "synth"
        run_cli(["synth", "--out", str(out_dir), "--n", "200", "--worlds", "6",
                 "--ambiguity-rate", "0.3", "--seed", "11"])
        model_path = tmp_path / "need.ckpt"
        code, _, _ = run_cli(["clarify", "need-train", "--input", str(out_dir / "single.jsonl"),
                              "--model", str(model_path)])
        assert code == 0
        code, out, _ = run_cli(["clarify", "need-eval", "--input", str(out_dir / "single.jsonl"),
                                "--model", str(model_path), "--format", "json-lines"])
        assert code == 0
        assert json.loads(out)["f1"] > 0.9  # training-set fit

    def test_reproducible_outputs(self):
        args = ["clarify", "rank", "--method", "bm25", "--n", "60", "--seed", "4",
                "--format", "json-lines"]
        one = run_cli(args)
        two = run_cli(args)
        assert one == two

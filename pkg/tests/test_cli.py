"""CLI behavior: command wiring, determinism, export/metrics artifacts.

Most tests call main() in-process for speed; determinism and the full
scenario replay run as real subprocesses in the acceptance suite.
"""

import json

import pytest

from designflow.cli import main
from designflow.workspace import load_workspace


def run_cli(capsys, *argv) -> dict:
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


@pytest.fixture()
def workspace_file(tmp_path):
    return str(tmp_path / "w.json")


class TestBrainstormCommand:
    def test_creates_workspace_file(self, capsys, workspace_file):
        body = run_cli(
            capsys, "brainstorm", "--workspace", workspace_file,
            "--context", "Urban sustainability", "--to", "storyboard",
            "-n", "3", "--mock", "--seed", "7",
        )
        assert len(body["personas"]) == 3
        assert len(body["storyboards"]) == 1
        workspace = load_workspace(open(workspace_file, "rb").read())
        assert workspace.name == "Urban sustainability"

    def test_guidance_flags(self, capsys, workspace_file):
        body = run_cli(
            capsys, "brainstorm", "--workspace", workspace_file,
            "--context", "research tools", "--to", "persona",
            "--guidance-persona", "PhD students who publish at CHI, IUI, or UIST",
            "--mock", "--seed", "1",
        )
        assert len(body["personas"]) == 3


class TestNodeCommands:
    def test_add_edit_connect_propagate(self, capsys, workspace_file):
        p = run_cli(
            capsys, "add-node", "--workspace", workspace_file, "--kind", "persona",
            "--content", '{"name": "Cli Cara"}', "--mock", "--seed", "1",
        )
        pr = run_cli(
            capsys, "add-node", "--workspace", workspace_file, "--kind", "problem",
            "--content", '{"title": "Cli problem"}', "--mock", "--seed", "1",
        )
        connect = run_cli(
            capsys, "connect", "--workspace", workspace_file,
            "--from", p["id"], "--to", pr["id"], "--mock", "--seed", "1",
        )
        assert connect["gestureDirection"] == "Forward"
        edit = run_cli(
            capsys, "edit", "--workspace", workspace_file, "--node", p["id"],
            "--content", '{"name": "Cli Cara", "bio": "updated"}', "--mock", "--seed", "1",
        )
        assert edit["marks"]
        result = run_cli(
            capsys, "propagate", "--workspace", workspace_file,
            "--node", p["id"], "--direction", "fwd", "--mock", "--seed", "1",
        )
        assert [u["node"] for u in result["updatedNodes"]] == [pr["id"]]

    def test_dry_run_leaves_file_untouched(self, capsys, workspace_file):
        p = run_cli(capsys, "add-node", "--workspace", workspace_file, "--kind", "persona",
                    "--content", '{"name": "A"}', "--mock", "--seed", "2")
        pr = run_cli(capsys, "add-node", "--workspace", workspace_file, "--kind", "problem",
                     "--content", '{"title": "B"}', "--mock", "--seed", "2")
        run_cli(capsys, "connect", "--workspace", workspace_file,
                "--from", p["id"], "--to", pr["id"], "--mock", "--seed", "2")
        before = open(workspace_file, "rb").read()
        plan = run_cli(capsys, "propagate", "--workspace", workspace_file,
                       "--node", p["id"], "--direction", "fwd", "--dry-run", "--mock", "--seed", "2")
        assert plan["steps"]
        assert open(workspace_file, "rb").read() == before

    def test_unique_prefix_resolution(self, capsys, workspace_file):
        p = run_cli(capsys, "add-node", "--workspace", workspace_file, "--kind", "persona",
                    "--content", '{"name": "A"}', "--mock", "--seed", "3")
        suggestions = run_cli(capsys, "suggest", "--workspace", workspace_file,
                              "--node", p["id"][:8], "--mock", "--seed", "3")
        assert suggestions["suggestions"]

    def test_missing_node_nonzero_exit(self, capsys, workspace_file):
        run_cli(capsys, "add-node", "--workspace", workspace_file, "--kind", "persona",
                "--mock", "--seed", "4")
        code = main(["suggest", "--workspace", workspace_file, "--node", "nope", "--mock"])
        captured = capsys.readouterr()
        assert code == 1
        assert json.loads(captured.err)["error"]["code"] == "NotFound"


class TestExportCommand:
    def test_empty_workspace_valid_markdown(self, capsys, workspace_file):
        run_cli(capsys, "init", "--workspace", workspace_file, "--name", "Blank", "--mock", "--seed", "5")
        main(["export", "--workspace", workspace_file, "--mock"])
        out = capsys.readouterr().out
        assert out.startswith("# Blank")
        assert "no nodes yet" in out

    def test_init_refuses_overwrite(self, capsys, workspace_file):
        run_cli(capsys, "init", "--workspace", workspace_file, "--mock", "--seed", "5")
        assert main(["init", "--workspace", workspace_file, "--mock"]) == 1
        capsys.readouterr()

    def test_storyboard_rendered_as_caption_sequence(self, capsys, workspace_file, tmp_path):
        run_cli(capsys, "brainstorm", "--workspace", workspace_file,
                "--context", "parks", "--to", "storyboard", "--mock", "--seed", "6")
        out_file = tmp_path / "export.md"
        run_cli(capsys, "export", "--workspace", workspace_file, "--out", str(out_file), "--mock")
        text = out_file.read_text()
        assert "## Storyboards" in text
        assert "1. **Context**" in text
        assert "mock://images/" in text


class TestMetricsCommand:
    def test_json_report(self, capsys, workspace_file):
        run_cli(capsys, "brainstorm", "--workspace", workspace_file,
                "--context", "parks", "--to", "solution", "--mock", "--seed", "8")
        report = run_cli(capsys, "metrics", "--workspace", workspace_file, "--mock")
        assert report["nodeCounts"]["Persona"] == 3
        assert report["featureUsage"]["Start Brainstorming"] == 1

    def test_report_dir_writes_csv_and_figures(self, capsys, workspace_file, tmp_path):
        run_cli(capsys, "brainstorm", "--workspace", workspace_file,
                "--context", "parks", "--to", "solution", "--mock", "--seed", "9")
        report_dir = tmp_path / "report"
        body = run_cli(capsys, "metrics", "--workspace", workspace_file,
                       "--report-dir", str(report_dir), "--mock")
        names = {p.rsplit("/", 1)[-1] for p in body["reportFiles"]}
        assert names == {"metrics.csv", "node_counts.png", "feature_usage.png", "iteration_activity.png"}
        csv_text = (report_dir / "metrics.csv").read_text()
        assert "nodeCounts.Persona,3" in csv_text
        assert (report_dir / "node_counts.png").stat().st_size > 0

"""Acceptance suite: every exit criterion at its stated budget.

Run with `pytest tests/test_acceptance.py -v -s` to see one
ACCEPTANCE PASS/FAIL line per criterion.
"""

import contextlib
import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from designflow.artifacts import (
    ArtifactKind,
    PersonaContent,
    ProblemContent,
    SolutionContent,
    diff_content,
    empty_content,
)
from designflow.errors import EdgeExistsError, EdgeIllegalError, ProviderError, SchemaViolationError
from designflow.graph import DesignGraph
from designflow.pipeline import BrainstormSpec
from designflow.prompts import corpus_checksums, render_template, template_corpus
from designflow.propagation import Direction, Trigger
from designflow.providers import MockModelProvider
from designflow.session import DesignSession
from designflow.workspace import compute_metrics, load_workspace, save_workspace

from oracles import lcs_spans_oracle, reachable_oracle
from test_prompts import CORPUS_SHA256
from test_workspace import random_workspace


@contextlib.contextmanager
def criterion(name: str, limit: float | None = None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE FAIL: {name}")
        raise
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        print(f"\nACCEPTANCE FAIL: {name} (runtime {elapsed:.2f}s over the {limit:.0f}s budget)")
        raise AssertionError(f"{name}: {elapsed:.2f}s exceeded the {limit:.0f}s budget")
    budget = f", {elapsed:.2f}s < {limit:.0f}s" if limit is not None else f", {elapsed:.2f}s"
    print(f"\nACCEPTANCE PASS: {name}{budget}")


STAGED = [ArtifactKind.PERSONA, ArtifactKind.PROBLEM, ArtifactKind.SOLUTION, ArtifactKind.STORYBOARD]


def test_template_fidelity():
    """Rendered prompts with bindings stripped reproduce the corpus
    byte-for-byte; checksums pin the shipped corpus text."""
    with criterion("template fidelity", limit=1.0):
        assert corpus_checksums() == CORPUS_SHA256
        for name, template in template_corpus().items():
            bindings = {
                b: f"⟦{i}:{b}⟧" for i, b in enumerate(template.required_bindings)
            }
            rendered = render_template(name, bindings).text
            for key, value in bindings.items():
                rendered = rendered.replace(value, "{" + key + "}")
            assert rendered == template.body, name
        assert len(template_corpus()) == 25


def test_graph_laws():
    """10,000 randomized legal graphs: acyclicity, canonicalization, closure
    duality, and closure equality against a brute-force reachability oracle."""
    with criterion("graph laws (10,000 graphs)", limit=30.0):
        rng = random.Random(20240811)
        for _ in range(10_000):
            graph = DesignGraph()
            n = rng.randint(1, 50)
            for i in range(n):
                kind = rng.choice(STAGED)
                graph.add_node(f"n{i}", kind, empty_content(kind))
            ids = list(graph.nodes)
            for _ in range(rng.randint(0, 2 * n)):
                a, b = rng.choice(ids), rng.choice(ids)
                try:
                    graph.connect(a, b)
                except (EdgeIllegalError, EdgeExistsError):
                    pass

            pairs = [(e.upstream, e.downstream) for e in graph.edges]
            # acyclicity: every stored edge ascends the stage order
            for up, down in pairs:
                assert graph.nodes[up].kind.stage < graph.nodes[down].kind.stage
            # canonicalization: the reversed gesture maps to the same edge value
            if pairs:
                up, down = rng.choice(pairs)
                with pytest.raises(EdgeExistsError):
                    graph.connect(down, up)
            # closures vs oracle + duality
            probes = ids if n <= 25 else rng.sample(ids, 8)
            for nid in probes:
                down_closure = graph.downstream_closure(nid)
                up_closure = graph.upstream_closure(nid)
                assert set(down_closure) == reachable_oracle(pairs, nid, forward=True)
                assert set(up_closure) == reachable_oracle(pairs, nid, forward=False)
                for other in down_closure[:3]:
                    assert nid in graph.upstream_closure(other)


def _chain_session(seed: int, length: int) -> tuple[DesignSession, list[str]]:
    session = DesignSession.create_workspace("prop", seed=seed)
    kinds = [STAGED[i] for i in range(length)]
    contents = {
        ArtifactKind.PERSONA: PersonaContent(name="Prop Pat", bio="b", location="l",
                                             needs="n", challenges="c", description="d"),
        ArtifactKind.PROBLEM: ProblemContent(title="Prop problem", context="ctx"),
        ArtifactKind.SOLUTION: SolutionContent(title="Prop solution", benefits="good"),
        ArtifactKind.STORYBOARD: empty_content(ArtifactKind.STORYBOARD),
    }
    ids = []
    for kind in kinds:
        node = session.add_node(kind, contents[kind])
        ids.append(node.id)
    for up, down in zip(ids, ids[1:]):
        session.graph.connect(up, down)
        session.graph.clear_mark(down)
    return session, ids


def _diamond_session(seed: int) -> tuple[DesignSession, list[str]]:
    session = DesignSession.create_workspace("prop", seed=seed)
    p = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Dia Dan"))
    pr1 = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="Left"))
    pr2 = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="Right"))
    s = session.add_node(ArtifactKind.SOLUTION, SolutionContent(title="Join"))
    for up, down in ((p, pr1), (p, pr2), (pr1, s), (pr2, s)):
        session.graph.connect(up.id, down.id)
        session.graph.clear_mark(down.id)
    return session, [p.id, pr1.id, pr2.id, s.id]


class _FailOnce(MockModelProvider):
    def __init__(self, fail_on_call: int, **kwargs):
        super().__init__(**kwargs)
        self.fail_on_call = fail_on_call
        self.calls_seen = 0

    def complete_json(self, *args, **kwargs):
        self.calls_seen += 1
        if self.calls_seen == self.fail_on_call:
            raise ProviderError("injected failure")
        return super().complete_json(*args, **kwargs)


def test_propagation_soundness():
    """Randomized chains/diamonds: (a) topological step order, (b) executing
    a forward plan clears every origin-caused mark in the downstream closure,
    (c) mid-plan failure plus resume equals an unfailed run, exactly."""
    with criterion("propagation soundness", limit=60.0):
        rng = random.Random(991)
        for case in range(40):
            seed = rng.randint(0, 10**6)
            use_chain = case % 2 == 0
            chain_length = rng.randint(2, 4)
            if use_chain:
                session, ids = _chain_session(seed, chain_length)
            else:
                session, ids = _diamond_session(seed)
            origin = ids[0]
            session.propagation.apply_update(
                origin, PersonaContent(name=f"Edited {case}"), Trigger.MANUAL_EDIT
            )

            # (a) order soundness
            plan = session.propagation.build_plan(origin, Direction.FORWARD)
            seen: set[str] = set()
            plan_targets = {s.target for s in plan.steps}
            for step in plan.steps:
                ancestors = set(session.graph.upstream_closure(step.target)) & plan_targets
                assert ancestors <= seen
                seen.add(step.target)

            # (b) mark conservation
            session.propagation.execute_plan(plan)
            for nid in session.graph.downstream_closure(origin):
                mark = session.graph.node(nid).dirty
                assert mark is None or mark.cause != origin
            reference = {nid: session.graph.node(nid).content for nid in ids}

            # (c) failure then resume reaches the unfailed outcome
            if use_chain:
                failing, fids = _chain_session(seed, len(ids))
            else:
                failing, fids = _diamond_session(seed)
            fail_on = 1 if len(plan.steps) == 1 else 2
            failing.provider = provider = _FailOnce(fail_on, seed=failing.provider.seed)
            failing.pipeline.provider = provider
            failing.propagation.apply_update(
                fids[0], PersonaContent(name=f"Edited {case}"), Trigger.MANUAL_EDIT
            )
            result = failing.propagation.execute_plan(
                failing.propagation.build_plan(fids[0], Direction.FORWARD)
            )
            assert not result.ok
            assert failing.graph.node(result.failed_node).dirty is not None
            failing.propagation.update_single(result.failed_node)
            failing.propagation.execute_plan(
                failing.propagation.build_plan(result.failed_node, Direction.FORWARD)
            )
            for ref_id, nid in zip(ids, fids):
                assert failing.graph.node(nid).content == reference[ref_id]


def test_storyboard_pipeline_call_shape():
    """Exactly 1 outline call, 1 image-prompt call, and F image calls for
    F in 4..8; an outline under 4 frames is a schema violation."""
    with criterion("storyboard pipeline call shape", limit=5.0):
        inputs = {
            ArtifactKind.PERSONA: [PersonaContent(name="Eco Emily")],
            ArtifactKind.PROBLEM: [ProblemContent(title="Hard to avoid plastic")],
            ArtifactKind.SOLUTION: [SolutionContent(title="Plant-based Packaging")],
        }
        for frames in range(4, 9):
            provider = MockModelProvider(seed=1, outline_frames=frames)
            session = DesignSession.create_workspace("sb", provider=provider, seed=1)
            content = session.pipeline.build_storyboard(inputs, [], "comic-book")
            assert len(content.frames) == frames
            trace = provider.trace
            assert trace.count("generate_storyboard_outline") == 1
            assert trace.count("generate_storyboard_image_prompts") == 1
            assert len(trace.image_calls()) == frames
            assert len(trace.text_calls()) == 2

        short_provider = MockModelProvider(seed=1, outline_frames=3)
        session = DesignSession.create_workspace("sb", provider=short_provider, seed=1)
        with pytest.raises(SchemaViolationError):
            session.pipeline.build_storyboard(inputs, [], "comic-book")


def test_feedback_incorporation_flow():
    """The exact before/after titles from the feedback walkthrough, with a
    non-empty word-LCS diff on the title field."""
    with criterion("feedback incorporation title rewrite"):
        old_title = "Low Financial Literacy in Young Adults"
        new_title = "Financial Literacy on Credit Management in Young Adults"
        session = DesignSession.create_workspace("feedback", seed=6)
        node = session.add_node(
            ArtifactKind.PROBLEM,
            ProblemContent(title=old_title, context="c", stakeholders="s", objectives="o"),
        )
        before = session.graph.node(node.id).content
        assert before.title == old_title

        questions = session.feedback.generate_feedback([node.id])
        question = next(
            q for q in questions
            if q.text == "Are there specific financial topics that young adults struggle with?"
        )
        session.feedback.incorporate_feedback(question, "Credit management and debt accumulation")
        after = session.graph.node(node.id).content
        assert after.title == new_title

        diff = diff_content(before, after)
        title_change = next(c for c in diff.changes if c.field_path == "title")
        assert title_change.changed_spans
        assert list(title_change.changed_spans) == lcs_spans_oracle(old_title, new_title)


def test_generation_fanout_shapes():
    """Generate-next fan-out shapes and the full brainstorm layout, exact."""
    with criterion("generation fan-out shapes"):
        session = DesignSession.create_workspace("shapes", seed=11)
        solo = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Solo Sam"))
        result = session.generate_next([solo.id], n=3)
        assert (len(result.nodes), len(result.edges)) == (3, 3)

        for k, n in ((2, 2), (3, 2), (2, 5)):
            s = DesignSession.create_workspace("shapes", seed=100 + k * 10 + n)
            selected = [
                s.add_node(ArtifactKind.PERSONA, PersonaContent(name=f"P {i}")).id
                for i in range(k)
            ]
            r = s.generate_next(selected, n=n)
            assert (len(r.nodes), len(r.edges)) == (n, k * n)

        s = DesignSession.create_workspace("brainstorm", seed=3)
        brainstormed = s.brainstorm(
            BrainstormSpec(ArtifactKind.STORYBOARD, "Urban sustainability", number_of_variations=3)
        )
        kinds = [s.graph.node(nid).kind for nid in brainstormed.nodes]
        assert s.graph.node(brainstormed.context_node).kind is ArtifactKind.CONTEXT
        assert kinds.count(ArtifactKind.PERSONA) == 3
        assert kinds.count(ArtifactKind.PROBLEM) == 3
        assert kinds.count(ArtifactKind.SOLUTION) == 3
        assert kinds.count(ArtifactKind.STORYBOARD) == 1
        assert len(s.graph.nodes) == 11
        assert len(brainstormed.edges) == 7


def _cli(tmp_path: Path, *argv: str) -> dict:
    proc = subprocess.run(
        [sys.executable, "-m", "designflow.cli", *argv],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert proc.returncode == 0, f"{argv}\nstdout: {proc.stdout}\nstderr: {proc.stderr}"
    return json.loads(proc.stdout) if proc.stdout.strip() else {}


def test_scenario_replay(tmp_path):
    """The full packaging-design walkthrough scripted against the CLI in mock
    mode: brainstorm, feedback incorporation, guided generate-more, storyboard,
    forward propagation; metrics match a hand-counted oracle of the script."""
    with criterion("scenario replay via CLI", limit=10.0):
        w = "scenario.json"
        seeded = ("--mock", "--seed", "11")
        brainstorm = _cli(
            tmp_path, "brainstorm", "--workspace", w,
            "--context", "sustainable packaging solution for grocery stores",
            "--to", "solution", "-n", "3", *seeded,
        )
        problem = brainstorm["problems"][0]
        solution = brainstorm["solutions"][0]

        questions = _cli(tmp_path, "feedback", "--workspace", w, "--node", problem, *seeded)
        assert questions["questions"]
        _cli(
            tmp_path, "incorporate", "--workspace", w,
            "--question", questions["questions"][0]["id"],
            "--response", "Include the economic challenges of transitioning to sustainable packaging",
            *seeded,
        )
        more = _cli(
            tmp_path, "generate-more", "--workspace", w, "--node", solution,
            "--guidance", "biodegradable packaging", "-n", "3", *seeded,
        )
        assert len(more["nodes"]) == 3
        _cli(tmp_path, "storyboard", "--workspace", w, "--solution", solution, *seeded)
        propagated = _cli(
            tmp_path, "propagate", "--workspace", w, "--node", problem,
            "--direction", "fwd", *seeded,
        )
        assert len(propagated["updatedNodes"]) == 2  # solution + storyboard

        metrics = _cli(tmp_path, "metrics", "--workspace", w, "--mock")
        # hand-counted oracle of the script's events
        assert metrics["nodeCounts"] == {
            "Context": 1, "Persona": 3, "Problem": 3, "Solution": 6, "Storyboard": 1,
        }
        assert metrics["forwardPropEdits"] == 1
        assert metrics["nodesUpdatedForward"] == 2
        assert metrics["backPropEdits"] == 0
        assert metrics["individualNodeEdits"] == 0
        assert metrics["featureUsage"] == {
            "Start Brainstorming": 1,
            "View Feedback": 1,
            "Incorporate Feedback": 1,
            "Generate More": 1,
            "Build Storyboard": 1,
            "Forward Propagate": 1,
        }
        assert metrics["featureUsage"]["Generate More"] >= 1
        assert metrics["forwardPropEdits"] >= 1

        workspace = load_workspace((tmp_path / w).read_bytes())
        assert len(workspace.events) == 20


def test_persistence_roundtrip_1000():
    """Round-trip equality over 1,000 randomized workspaces (feedback,
    descriptions, events included); metrics replay-pure after reload."""
    with criterion("persistence round-trip (1,000 workspaces)", limit=30.0):
        rng = random.Random(888)
        for _ in range(1_000):
            workspace = random_workspace(rng)
            reloaded = load_workspace(save_workspace(workspace))
            assert reloaded == workspace
            assert compute_metrics(reloaded) == compute_metrics(workspace)
            assert save_workspace(reloaded) == save_workspace(workspace)


def test_cli_determinism(tmp_path):
    """Any command sequence with --mock --seed N run twice produces
    byte-identical workspace files."""
    with criterion("CLI determinism"):
        for run in ("a", "b"):
            d = tmp_path / run
            d.mkdir()
            _cli(
                d, "brainstorm", "--workspace", "w.json",
                "--context", "Urban sustainability", "--to", "storyboard",
                "-n", "3", "--mock", "--seed", "7",
            )
            body = json.loads((d / "w.json").read_text())
            solution = next(
                n["id"] for n in body["graph"]["nodes"] if n["kind"] == "Solution"
            )
            _cli(
                d, "generate-more", "--workspace", "w.json", "--node", solution,
                "-n", "2", "--mock", "--seed", "7",
            )
        assert (tmp_path / "a" / "w.json").read_bytes() == (tmp_path / "b" / "w.json").read_bytes()

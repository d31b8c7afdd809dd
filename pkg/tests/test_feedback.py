"""Feedback questions, incorporation, and AI revision flows."""

import pytest

from designflow.artifacts import ArtifactKind, PersonaContent, ProblemContent, SolutionContent
from designflow.errors import AlreadyIncorporatedError, PreconditionError, ProviderError
from designflow.feedback import FILL_MISSING_TEXT, RevisionSource
from designflow.graph import MarkKind
from designflow.propagation import Trigger
from designflow.providers import MockModelProvider
from designflow.session import DesignSession

FINANCE_TITLE = "Low Financial Literacy in Young Adults"
CREDIT_QUESTION = "Are there specific financial topics that young adults struggle with?"
CREDIT_RESPONSE = "Credit management and debt accumulation"
CREDIT_TITLE = "Financial Literacy on Credit Management in Young Adults"


@pytest.fixture()
def session():
    return DesignSession.create_workspace("t", seed=9)


def finance_problem(session):
    return session.add_node(
        ArtifactKind.PROBLEM,
        ProblemContent(title=FINANCE_TITLE, context="c", stakeholders="s", objectives="o"),
    )


class TestGenerateFeedback:
    def test_finance_problem_canned_question(self, session):
        node = finance_problem(session)
        questions = session.feedback.generate_feedback([node.id])
        assert any(q.text == CREDIT_QUESTION for q in questions)
        assert all(q.targets == (node.id,) for q in questions)

    def test_group_selection_single_group_call(self, session):
        a = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="A One"))
        b = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="B Two"))
        c = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="C"))
        session.feedback.generate_feedback([a.id, b.id, c.id])
        trace = session.provider.trace
        assert trace.count("generate_group_feedback") == 1
        assert trace.count("generate_persona_feedback") == 0
        assert trace.count("generate_problem_feedback") == 0

    def test_empty_targets_rejected(self, session):
        with pytest.raises(PreconditionError):
            session.feedback.generate_feedback([])

    def test_questions_persist_on_workspace(self, session):
        node = finance_problem(session)
        questions = session.feedback.generate_feedback([node.id])
        assert session.workspace.questions_for(node.id) == questions


class TestIncorporateFeedback:
    def test_credit_feedback_title_transition(self, session):
        node = finance_problem(session)
        questions = session.feedback.generate_feedback([node.id])
        question = next(q for q in questions if q.text == CREDIT_QUESTION)
        changeset = session.feedback.incorporate_feedback(question, CREDIT_RESPONSE)
        assert session.graph.node(node.id).content.title == CREDIT_TITLE
        assert changeset.trigger is Trigger.FEEDBACK_INCORPORATED
        assert "title" in changeset.diff.field_paths
        assert question.incorporated

    def test_double_incorporation_rejected(self, session):
        node = finance_problem(session)
        question = session.feedback.generate_feedback([node.id])[0]
        session.feedback.incorporate_feedback(question, "resp")
        with pytest.raises(AlreadyIncorporatedError):
            session.feedback.incorporate_feedback(question, "again")

    def test_mid_chain_incorporation_marks_neighbors(self, session):
        persona = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="P"))
        problem = finance_problem(session)
        solution = session.add_node(ArtifactKind.SOLUTION, SolutionContent(title="S"))
        session.graph.connect(persona.id, problem.id)
        session.graph.connect(problem.id, solution.id)
        for nid in (problem.id, solution.id):
            session.graph.clear_mark(nid)
        question = session.feedback.generate_feedback([problem.id])[0]
        changeset = session.feedback.incorporate_feedback(question, CREDIT_RESPONSE)
        assert changeset.marks[persona.id].kind is MarkKind.BACK_PROP
        assert changeset.marks[solution.id].kind is MarkKind.FORWARD_PROP

    def test_group_feedback_read_only(self, session):
        a = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="A One"))
        b = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="B Two"))
        question = session.feedback.generate_feedback([a.id, b.id])[0]
        with pytest.raises(PreconditionError):
            session.feedback.incorporate_feedback(question, "resp")


class TestSuggestRevisions:
    def test_filled_node_gets_ai_suggestions(self, session):
        node = session.add_node(
            ArtifactKind.SOLUTION,
            SolutionContent(title="T", problems_addressed="p", key_features="k", benefits="b"),
        )
        suggestions = session.feedback.suggest_revisions(node.id)
        assert any(s.text == "Partner with local schools for youth engagement" for s in suggestions)
        assert all(s.source is RevisionSource.AI_SUGGESTED for s in suggestions)

    def test_empty_fields_prepend_fill_missing(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Eco Emily"))
        suggestions = session.feedback.suggest_revisions(node.id)
        assert suggestions[0].text == FILL_MISSING_TEXT
        assert suggestions[0].source is RevisionSource.FILL_MISSING

    def test_over_cap_suggestion_dropped(self, session):
        class LongSuggestionProvider(MockModelProvider):
            def _suggestions(self, name):
                return {"suggestions": ["x" * 120, "short one"]}

        s = DesignSession.create_workspace("t", provider=LongSuggestionProvider(seed=1), seed=1)
        node = s.add_node(ArtifactKind.SOLUTION, SolutionContent(
            title="T", problems_addressed="p", key_features="k", benefits="b"))
        suggestions = s.feedback.suggest_revisions(node.id)
        assert [x.text for x in suggestions] == ["short one"]

    def test_provider_failure_still_returns_fill_missing(self, session):
        class FailingProvider(MockModelProvider):
            def complete_json(self, *args, **kwargs):
                raise ProviderError("down")

        s = DesignSession.create_workspace("t", provider=FailingProvider(seed=1), seed=1)
        node = s.add_node(ArtifactKind.PERSONA, PersonaContent(name="Eco Emily"))
        suggestions = s.feedback.suggest_revisions(node.id)
        assert [x.text for x in suggestions] == [FILL_MISSING_TEXT]


class TestReviseWithAi:
    def test_instruction_produces_diff_and_marks(self, session):
        persona = session.add_node(ArtifactKind.PERSONA, PersonaContent(
            name="P", location="l", bio="b", needs="n", challenges="c", description="d"))
        problem = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="T"))
        session.graph.connect(persona.id, problem.id)
        session.graph.clear_mark(problem.id)
        changeset = session.feedback.revise_with_ai(
            persona.id, "Add virtual workshops to increase participation"
        )
        assert changeset.trigger is Trigger.AI_REVISE
        assert changeset.diff
        assert problem.id in changeset.marks

    def test_fill_missing_preserves_existing_fields(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Eco Emily"))
        session.feedback.revise_with_ai(node.id, FILL_MISSING_TEXT)
        content = session.graph.node(node.id).content
        assert content.name == "Eco Emily"
        assert content.challenges  # filled in

    def test_empty_instruction_rejected(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="X"))
        with pytest.raises(PreconditionError):
            session.feedback.revise_with_ai(node.id, "   ")

"""Evaluative questions on nodes, feedback incorporation, and AI revisions.

Feedback questions persist with the workspace and are incorporated at most
once; incorporating one regenerates the target with the question/response
pair as context and fires the usual dirty-mark cascade. Revision suggestions
are capped at 100 characters, with a "Fill in missing values" entry prepended
whenever the target has gaps.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Sequence

from .artifacts import ArtifactKind, content_for_prompt, has_empty_fields, merge_partial
from .errors import AlreadyIncorporatedError, NotFoundError, PreconditionError, ProviderError
from .graph import NodeId
from .propagation import ChangeSet, Trigger

if TYPE_CHECKING:
    from .pipeline import GenerationPipeline
    from .propagation import PropagationEngine
    from .workspace import Workspace

logger = logging.getLogger(__name__)

MAX_SUGGESTION_LENGTH = 100
FILL_MISSING_TEXT = "Fill in missing values"

_KIND_FEEDBACK_TEMPLATE = {
    ArtifactKind.PERSONA: ("generate_persona_feedback", "persona"),
    ArtifactKind.PROBLEM: ("generate_problem_feedback", "problem"),
    ArtifactKind.SOLUTION: ("generate_solution_feedback", "solution"),
    ArtifactKind.STORYBOARD: ("generate_storyboard_feedback", "storyboard"),
}


@dataclass
class FeedbackQuestion:
    id: str
    targets: tuple[NodeId, ...]
    text: str
    incorporated: bool = False

    @property
    def is_group(self) -> bool:
        return len(self.targets) > 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "targets": list(self.targets),
            "text": self.text,
            "incorporated": self.incorporated,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FeedbackQuestion":
        return cls(
            id=data["id"],
            targets=tuple(data["targets"]),
            text=data["text"],
            incorporated=data["incorporated"],
        )


class RevisionSource(str, Enum):
    USER_TYPED = "UserTyped"
    AI_SUGGESTED = "AiSuggested"
    FILL_MISSING = "FillMissing"


@dataclass(frozen=True)
class RevisionInstruction:
    text: str
    source: RevisionSource

    def to_dict(self) -> dict[str, str]:
        return {"text": self.text, "source": self.source.value}


class FeedbackEngine:
    def __init__(
        self,
        workspace: "Workspace",
        pipeline: "GenerationPipeline",
        propagation: "PropagationEngine",
    ):
        self.workspace = workspace
        self.pipeline = pipeline
        self.propagation = propagation

    # -- question generation -------------------------------------------------

    def generate_feedback(self, targets: Sequence[NodeId]) -> list[FeedbackQuestion]:
        """Kind-specific template for one target, group template for several."""
        if not targets:
            raise PreconditionError("feedback needs at least one target node")
        nodes = [self.workspace.graph.node(t) for t in targets]
        if len(nodes) == 1:
            node = nodes[0]
            if node.kind not in _KIND_FEEDBACK_TEMPLATE:
                raise PreconditionError(f"{node.kind.value} nodes take no feedback")
            template, binding = _KIND_FEEDBACK_TEMPLATE[node.kind]
            bindings = {binding: _pretty(content_for_prompt(node.content))}
        else:
            template = "generate_group_feedback"
            bindings = {
                "nodes": _pretty(
                    [
                        {"kind": n.kind.value, "content": content_for_prompt(n.content)}
                        for n in nodes
                    ]
                )
            }
        value = self.pipeline._complete(template, bindings)
        questions = [
            FeedbackQuestion(
                id=self.workspace.new_question_id(),
                targets=tuple(targets),
                text=text,
            )
            for text in value["questions"]
        ]
        self.workspace.feedback.setdefault(targets[0], []).extend(questions)
        self.workspace.log(
            "FeedbackGenerated", targets=list(targets), questions=len(questions)
        )
        return questions

    def find_question(self, question_id: str) -> FeedbackQuestion:
        for questions in self.workspace.feedback.values():
            for question in questions:
                if question.id == question_id:
                    return question
        raise NotFoundError(f"feedback question {question_id} does not exist")

    # -- incorporation -------------------------------------------------------

    def incorporate_feedback(self, question: FeedbackQuestion | str, user_response: str) -> ChangeSet:
        """Regenerate the target with the question/response pair as context;
        a question contributes to at most one revision."""
        if isinstance(question, str):
            question = self.find_question(question)
        if question.incorporated:
            raise AlreadyIncorporatedError(
                f"question {question.id} was already incorporated"
            )
        if question.is_group:
            raise PreconditionError("group feedback is read-only and cannot be incorporated")
        target_id = question.targets[0]
        node = self.workspace.graph.node(target_id)
        context = f"Feedback question: {question.text}\nResponse: {user_response}"
        new_content = self.pipeline.regenerate_node_content(node, context)
        changeset = self.propagation.apply_update(
            target_id, new_content, Trigger.FEEDBACK_INCORPORATED
        )
        question.incorporated = True
        return changeset

    # -- revisions -------------------------------------------------------------

    def suggest_revisions(self, target_id: NodeId) -> list[RevisionInstruction]:
        node = self.workspace.graph.node(target_id)
        fill_missing = has_empty_fields(node.content)
        suggestions: list[RevisionInstruction] = []
        if fill_missing:
            suggestions.append(RevisionInstruction(FILL_MISSING_TEXT, RevisionSource.FILL_MISSING))
        try:
            value = self.pipeline._complete(
                "revise_node_recommendations",
                {"nodes": _pretty([content_for_prompt(node.content)])},
            )
        except ProviderError as exc:
            if fill_missing:
                logger.warning("suggestion generation failed, keeping fill-missing: %s", exc)
                return suggestions
            raise
        for text in value["suggestions"]:
            if len(text) > MAX_SUGGESTION_LENGTH:
                logger.warning("dropping over-long suggestion (%d chars): %.40s...", len(text), text)
                continue
            suggestions.append(RevisionInstruction(text, RevisionSource.AI_SUGGESTED))
        return suggestions

    def revise_with_ai(
        self, target_id: NodeId, instruction: RevisionInstruction | str
    ) -> ChangeSet:
        """Apply a natural-language instruction; fill-missing runs through the
        partial merge so existing fields are never overwritten."""
        if isinstance(instruction, str):
            source = (
                RevisionSource.FILL_MISSING
                if instruction == FILL_MISSING_TEXT
                else RevisionSource.USER_TYPED
            )
            instruction = RevisionInstruction(instruction, source)
        if not instruction.text.strip():
            raise PreconditionError("revision instruction must be non-empty")
        node = self.workspace.graph.node(target_id)
        generated = self.pipeline.regenerate_node_content(node, instruction.text)
        if instruction.source is RevisionSource.FILL_MISSING:
            generated = merge_partial(node.content, generated)
        return self.propagation.apply_update(target_id, generated, Trigger.AI_REVISE)


def _pretty(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, indent=2, sort_keys=True)

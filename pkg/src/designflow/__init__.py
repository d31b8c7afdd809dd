"""designflow: a staged design-artifact workspace with AI generation and
forward/backward change propagation."""

from .artifacts import (
    ArtifactKind,
    ContextContent,
    FieldDiff,
    Frame,
    FrameType,
    PersonaContent,
    ProblemContent,
    SolutionContent,
    StoryboardContent,
    ValidationReport,
    VisualCharacterDescription,
    diff_content,
    merge_partial,
    validate_content,
)
from .feedback import FeedbackQuestion, RevisionInstruction, RevisionSource
from .graph import DesignGraph, DirtyMark, Edge, GestureDirection, MarkKind, Node
from .pipeline import BrainstormSpec, GenerationPipeline
from .propagation import ChangeSet, Direction, PropagationEngine, PropagationPlan, Trigger
from .providers import MockModelProvider, ModelProvider, make_provider
from .session import DesignSession
from .workspace import (
    Event,
    EventType,
    MetricsReport,
    Settings,
    Workspace,
    compute_metrics,
    load_workspace,
    save_workspace,
)

__version__ = "0.1.0"

__all__ = [
    "ArtifactKind",
    "BrainstormSpec",
    "ChangeSet",
    "ContextContent",
    "DesignGraph",
    "DesignSession",
    "Direction",
    "DirtyMark",
    "Edge",
    "Event",
    "EventType",
    "FeedbackQuestion",
    "FieldDiff",
    "Frame",
    "FrameType",
    "GenerationPipeline",
    "GestureDirection",
    "MarkKind",
    "MetricsReport",
    "MockModelProvider",
    "ModelProvider",
    "Node",
    "PersonaContent",
    "ProblemContent",
    "PropagationEngine",
    "PropagationPlan",
    "RevisionInstruction",
    "RevisionSource",
    "Settings",
    "SolutionContent",
    "StoryboardContent",
    "Trigger",
    "ValidationReport",
    "VisualCharacterDescription",
    "Workspace",
    "compute_metrics",
    "diff_content",
    "load_workspace",
    "make_provider",
    "merge_partial",
    "save_workspace",
    "validate_content",
    "__version__",
]

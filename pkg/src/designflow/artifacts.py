"""Typed content for every design artifact kind, plus field-level diffing.

Content values are plain text (emojis allowed); an image is an opaque
reference (URI or relative path), never bytes. Everything here is a pure
value type: safe to share across threads, safe to serialize canonically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Union

from .errors import InvalidContentError, KindMismatchError


class ArtifactKind(str, Enum):
    CONTEXT = "Context"
    PERSONA = "Persona"
    PROBLEM = "Problem"
    SOLUTION = "Solution"
    STORYBOARD = "Storyboard"

    @property
    def stage(self) -> int | None:
        """Position in the design-stage order; Context carries no stage."""
        return _STAGES.get(self)


_STAGES = {
    ArtifactKind.PERSONA: 0,
    ArtifactKind.PROBLEM: 1,
    ArtifactKind.SOLUTION: 2,
    ArtifactKind.STORYBOARD: 3,
}

STAGE_ORDER = (
    ArtifactKind.PERSONA,
    ArtifactKind.PROBLEM,
    ArtifactKind.SOLUTION,
    ArtifactKind.STORYBOARD,
)


class FrameType(str, Enum):
    CONTEXT = "Context"
    PROBLEM = "Problem"
    SOLUTION = "Solution"
    RESOLUTION = "Resolution"


@dataclass
class PersonaContent:
    name: str = ""
    location: str = ""
    bio: str = ""
    needs: str = ""
    challenges: str = ""
    description: str = ""
    image: str | None = None

    kind = ArtifactKind.PERSONA


@dataclass
class ProblemContent:
    title: str = ""
    context: str = ""
    stakeholders: str = ""
    objectives: str = ""
    image: str | None = None

    kind = ArtifactKind.PROBLEM


@dataclass
class SolutionContent:
    title: str = ""
    problems_addressed: str = ""
    key_features: str = ""
    benefits: str = ""
    image: str | None = None

    kind = ArtifactKind.SOLUTION


@dataclass
class Frame:
    frame_type: FrameType = FrameType.CONTEXT
    description: str = ""
    caption: str = ""
    image_prompt: str = ""
    image_negative_prompt: str = ""
    image: str | None = None


DEFAULT_FRAME_COUNT = 4


@dataclass
class StoryboardContent:
    title: str = ""
    frames: list[Frame] = field(default_factory=lambda: [Frame() for _ in range(DEFAULT_FRAME_COUNT)])
    style: str = "comic-book"

    kind = ArtifactKind.STORYBOARD


@dataclass
class ContextContent:
    label: str = ""

    kind = ArtifactKind.CONTEXT


ArtifactContent = Union[PersonaContent, ProblemContent, SolutionContent, StoryboardContent, ContextContent]

_CONTENT_TYPES: dict[ArtifactKind, type] = {
    ArtifactKind.PERSONA: PersonaContent,
    ArtifactKind.PROBLEM: ProblemContent,
    ArtifactKind.SOLUTION: SolutionContent,
    ArtifactKind.STORYBOARD: StoryboardContent,
    ArtifactKind.CONTEXT: ContextContent,
}

# Wire names are camelCase; attribute names are snake_case.
_FIELD_NAMES: dict[type, dict[str, str]] = {
    PersonaContent: {
        "name": "name",
        "location": "location",
        "bio": "bio",
        "needs": "needs",
        "challenges": "challenges",
        "description": "description",
        "image": "image",
    },
    ProblemContent: {
        "title": "title",
        "context": "context",
        "stakeholders": "stakeholders",
        "objectives": "objectives",
        "image": "image",
    },
    SolutionContent: {
        "title": "title",
        "problems_addressed": "problemsAddressed",
        "key_features": "keyFeatures",
        "benefits": "benefits",
        "image": "image",
    },
    StoryboardContent: {"title": "title", "frames": "frames", "style": "style"},
    ContextContent: {"label": "label"},
    Frame: {
        "frame_type": "frameType",
        "description": "description",
        "caption": "caption",
        "image_prompt": "imagePrompt",
        "image_negative_prompt": "imageNegativePrompt",
        "image": "image",
    },
}


@dataclass
class VisualCharacterDescription:
    """Reusable visual description of a character, keyed by the character's name."""

    character_name: str
    description: str

    def to_dict(self) -> dict[str, str]:
        return {"characterName": self.character_name, "description": self.description}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "VisualCharacterDescription":
        return cls(character_name=data["characterName"], description=data["description"])


@dataclass(frozen=True)
class Violation:
    field_path: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "complete": self.complete,
            "violations": [{"fieldPath": v.field_path, "message": v.message} for v in self.violations],
        }


@dataclass(frozen=True)
class FieldChange:
    field_path: str
    old_value: str
    new_value: str
    changed_spans: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "fieldPath": self.field_path,
            "oldValue": self.old_value,
            "newValue": self.new_value,
            "changedSpans": [list(s) for s in self.changed_spans],
        }


@dataclass
class FieldDiff:
    changes: list[FieldChange] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.changes)

    @property
    def field_paths(self) -> list[str]:
        return [c.field_path for c in self.changes]

    def to_dict(self) -> dict[str, Any]:
        return {"changes": [c.to_dict() for c in self.changes]}


def content_to_dict(content: ArtifactContent) -> dict[str, Any]:
    """Canonical camelCase encoding of a content variant."""
    names = _FIELD_NAMES[type(content)]
    out: dict[str, Any] = {}
    for attr, wire in names.items():
        value = getattr(content, attr)
        if isinstance(content, StoryboardContent) and attr == "frames":
            value = [_frame_to_dict(f) for f in value]
        out[wire] = value
    return out


def _frame_to_dict(frame: Frame) -> dict[str, Any]:
    names = _FIELD_NAMES[Frame]
    out: dict[str, Any] = {}
    for attr, wire in names.items():
        value = getattr(frame, attr)
        if isinstance(value, FrameType):
            value = value.value
        out[wire] = value
    return out


def content_from_dict(kind: ArtifactKind, data: dict[str, Any]) -> ArtifactContent:
    cls = _CONTENT_TYPES[kind]
    names = _FIELD_NAMES[cls]
    kwargs: dict[str, Any] = {}
    for attr, wire in names.items():
        if wire not in data:
            continue
        value = data[wire]
        if cls is StoryboardContent and attr == "frames":
            value = [_frame_from_dict(f) for f in value]
        kwargs[attr] = value
    content = cls(**kwargs)
    check_structure(content)
    return content


def _frame_from_dict(data: dict[str, Any]) -> Frame:
    names = _FIELD_NAMES[Frame]
    kwargs: dict[str, Any] = {}
    for attr, wire in names.items():
        if wire not in data:
            continue
        value = data[wire]
        if attr == "frame_type":
            value = FrameType(value)
        kwargs[attr] = value
    return Frame(**kwargs)


def check_kind(kind: ArtifactKind, content: ArtifactContent) -> None:
    if not isinstance(content, _CONTENT_TYPES[kind]):
        raise KindMismatchError(
            f"content of type {type(content).__name__} does not match kind {kind.value}"
        )


def check_structure(content: ArtifactContent) -> None:
    """Enforce hard structural invariants (as opposed to completeness)."""
    if isinstance(content, StoryboardContent) and len(content.frames) < 1:
        raise InvalidContentError("a storyboard must have at least 1 frame")


def validate_content(kind: ArtifactKind, content: ArtifactContent) -> ValidationReport:
    """List completeness violations; an empty report means the content is complete."""
    check_kind(kind, content)
    violations: list[Violation] = []
    if isinstance(content, PersonaContent):
        if not content.name.strip():
            violations.append(Violation("name", "persona name is missing"))
    elif isinstance(content, ProblemContent):
        if not content.title.strip():
            violations.append(Violation("title", "problem title is missing"))
        elif content.title.rstrip().endswith("?"):
            violations.append(Violation("title", "a problem must be a statement, not a question (ends with '?')"))
    elif isinstance(content, SolutionContent):
        if not content.title.strip():
            violations.append(Violation("title", "solution title is missing"))
    elif isinstance(content, StoryboardContent):
        if not content.title.strip():
            violations.append(Violation("title", "storyboard title is missing"))
        for i, frame in enumerate(content.frames):
            if not frame.caption.strip():
                violations.append(Violation(f"frames[{i}].caption", "frame caption is missing"))
    elif isinstance(content, ContextContent):
        if not content.label.strip():
            violations.append(Violation("label", "context label is missing"))
    return ValidationReport(violations)


def _flatten(content: ArtifactContent) -> dict[str, str]:
    """Flatten a content variant into an ordered fieldPath -> text map."""
    names = _FIELD_NAMES[type(content)]
    flat: dict[str, str] = {}
    for attr, wire in names.items():
        value = getattr(content, attr)
        if isinstance(content, StoryboardContent) and attr == "frames":
            flat["frames"] = str(len(value))
            for i, frame in enumerate(value):
                for fattr, fwire in _FIELD_NAMES[Frame].items():
                    fvalue = getattr(frame, fattr)
                    if isinstance(fvalue, FrameType):
                        fvalue = fvalue.value
                    flat[f"frames[{i}].{fwire}"] = fvalue or ""
            continue
        flat[wire] = value if isinstance(value, str) else (value or "")
    return flat


_WORD_RE = re.compile(r"\S+")


def _word_lcs_spans(old: str, new: str) -> tuple[tuple[int, int], ...]:
    """Character spans in ``new`` covering maximal runs of words absent from
    the word-level longest common subsequence of ``old`` and ``new``.

    The alignment is canonical (leftmost match preferred), so span output is
    deterministic for a given input pair.
    """
    old_words = [m.group() for m in _WORD_RE.finditer(old)]
    new_tokens = [(m.group(), m.start(), m.end()) for m in _WORD_RE.finditer(new)]
    new_words = [t[0] for t in new_tokens]
    n, m = len(old_words), len(new_words)

    # dp[i][j] = LCS length of old_words[i:] and new_words[j:]
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, nxt = dp[i], dp[i + 1]
        for j in range(m - 1, -1, -1):
            if old_words[i] == new_words[j]:
                row[j] = nxt[j + 1] + 1
            else:
                row[j] = nxt[j] if nxt[j] >= row[j + 1] else row[j + 1]

    matched = [False] * m
    i = j = 0
    while i < n and j < m:
        if old_words[i] == new_words[j]:
            matched[j] = True
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1

    spans: list[tuple[int, int]] = []
    k = 0
    while k < m:
        if not matched[k]:
            start = new_tokens[k][1]
            while k < m and not matched[k]:
                end = new_tokens[k][2]
                k += 1
            spans.append((start, end))
        else:
            k += 1
    if not spans and old != new and new:
        # Same words, different separators; mark the whole value.
        spans.append((0, len(new)))
    return tuple(spans)


def diff_content(old: ArtifactContent, new: ArtifactContent) -> FieldDiff:
    """Field-level diff with word-LCS change spans in each new value."""
    if type(old) is not type(new):
        raise KindMismatchError(
            f"cannot diff {type(old).__name__} against {type(new).__name__}"
        )
    old_flat, new_flat = _flatten(old), _flatten(new)
    changes: list[FieldChange] = []
    for path in dict.fromkeys(list(old_flat) + list(new_flat)):
        old_value = old_flat.get(path, "")
        new_value = new_flat.get(path, "")
        if old_value != new_value:
            changes.append(FieldChange(path, old_value, new_value, _word_lcs_spans(old_value, new_value)))
    return FieldDiff(changes)


def _is_empty(value: Any) -> bool:
    if value is None:
        return True
    if isinstance(value, str):
        return not value.strip()
    return False


def merge_partial(existing: ArtifactContent, generated: ArtifactContent) -> ArtifactContent:
    """Fill every empty field of ``existing`` from ``generated``.

    Non-empty existing fields are preserved verbatim, which makes the merge
    idempotent. Storyboard frames are treated as one value: the existing
    frame list wins unless every frame in it is entirely empty.
    """
    if type(existing) is not type(generated):
        raise KindMismatchError(
            f"cannot merge {type(generated).__name__} into {type(existing).__name__}"
        )
    updates: dict[str, Any] = {}
    for attr in _FIELD_NAMES[type(existing)]:
        current = getattr(existing, attr)
        if isinstance(existing, StoryboardContent) and attr == "frames":
            if all(_frame_is_empty(f) for f in current):
                updates[attr] = [replace(f) for f in getattr(generated, attr)]
            continue
        if _is_empty(current):
            updates[attr] = getattr(generated, attr)
    return replace(existing, **updates) if updates else replace(existing)


def _frame_is_empty(frame: Frame) -> bool:
    return not any(
        (frame.description.strip(), frame.caption.strip(), frame.image_prompt.strip(),
         frame.image_negative_prompt.strip(), frame.image)
    )


def empty_content(kind: ArtifactKind) -> ArtifactContent:
    return _CONTENT_TYPES[kind]()


def has_empty_fields(content: ArtifactContent) -> bool:
    """True when any text field (image excluded) is empty; drives Fill-missing."""
    for attr in _FIELD_NAMES[type(content)]:
        if attr == "image":
            continue
        value = getattr(content, attr)
        if isinstance(content, StoryboardContent) and attr == "frames":
            if any(not f.caption.strip() or not f.description.strip() for f in value):
                return True
            continue
        if _is_empty(value):
            return True
    return False


def content_title(content: ArtifactContent) -> str:
    """The display title of a node: persona name, label, or title field."""
    if isinstance(content, PersonaContent):
        return content.name
    if isinstance(content, ContextContent):
        return content.label
    return content.title


def content_for_prompt(content: ArtifactContent) -> dict[str, Any]:
    """Content dict as shown to the model: image references stripped."""
    data = content_to_dict(content)
    data.pop("image", None)
    if isinstance(content, StoryboardContent):
        for frame in data.get("frames", []):
            frame.pop("image", None)
    return data

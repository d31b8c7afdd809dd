"""Prompt template corpus: loading, rendering, and response schemas.

Templates live as plain-text files under ``templates/`` with ``{placeholder}``
slots. Rendering is byte-exact substitution and nothing else, so a rendered
prompt with its bindings stripped back out reproduces the corpus text
byte-for-byte. Each template names the JSON schema its response must satisfy.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from .errors import MissingBindingError, UnknownTemplateError

TEMPLATE_CORPUS_VERSION = 1

_PLACEHOLDER_RE = re.compile(r"\{([a-zA-Z][a-zA-Z0-9]*)\}")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    required_bindings: tuple[str, ...]
    response_schema_name: str


@dataclass(frozen=True)
class RenderedPrompt:
    template_name: str
    text: str
    response_schema_name: str
    bindings_digest: str


# template name -> response schema name
_SCHEMA_FOR_TEMPLATE = {
    "enforce_json_schema": "",
    "generate_personas": "persona_list",
    "regenerate_personas": "persona_list",
    "generate_problems": "problem_list",
    "regenerate_problems": "problem_list",
    "generate_solutions": "solution_list",
    "regenerate_solutions": "solution_list",
    "generate_storyboard_outline": "storyboard_outline",
    "generate_storyboard_image_prompts": "storyboard_image_prompts",
    "generate_illustrative_image_prompt": "image_prompt",
    "generate_problem_illustrative_image_prompt": "image_prompt",
    "generate_visual_character_descriptions": "character_description",
    "generate_persona_feedback": "feedback_list",
    "generate_problem_feedback": "feedback_list",
    "generate_solution_feedback": "feedback_list",
    "generate_storyboard_feedback": "feedback_list",
    "generate_group_feedback": "feedback_list",
    "generate_problems_recommendations": "suggestion_list",
    "generate_solution_recommendations": "suggestion_list",
    "generate_dependent_storyboard_recommendations": "suggestion_list",
    "generate_more_personas_recommendations": "suggestion_list",
    "generate_more_problems_recommendations": "suggestion_list",
    "generate_more_solutions_recommendations": "suggestion_list",
    "generate_more_storyboard_recommendations": "suggestion_list",
    "revise_node_recommendations": "suggestion_list",
}

_STRING = {"type": "string"}

_PERSONA_OBJECT = {
    "type": "object",
    "properties": {
        "name": _STRING, "location": _STRING, "bio": _STRING,
        "needs": _STRING, "challenges": _STRING, "description": _STRING,
    },
    "required": ["name"],
    "additionalProperties": True,
}

_PROBLEM_OBJECT = {
    "type": "object",
    "properties": {
        "title": _STRING, "context": _STRING,
        "stakeholders": _STRING, "objectives": _STRING,
    },
    "required": ["title"],
    "additionalProperties": True,
}

_SOLUTION_OBJECT = {
    "type": "object",
    "properties": {
        "title": _STRING, "problemsAddressed": _STRING,
        "keyFeatures": _STRING, "benefits": _STRING,
    },
    "required": ["title"],
    "additionalProperties": True,
}

_FRAME_OUTLINE_OBJECT = {
    "type": "object",
    "properties": {
        "frameType": {"type": "string", "enum": ["Context", "Problem", "Solution", "Resolution"]},
        "description": _STRING,
        "caption": _STRING,
    },
    "required": ["frameType", "description", "caption"],
    "additionalProperties": True,
}

RESPONSE_SCHEMAS: dict[str, dict[str, Any]] = {
    "persona_list": {
        "type": "object",
        "properties": {"personas": {"type": "array", "items": _PERSONA_OBJECT, "minItems": 1}},
        "required": ["personas"],
    },
    "problem_list": {
        "type": "object",
        "properties": {"problems": {"type": "array", "items": _PROBLEM_OBJECT, "minItems": 1}},
        "required": ["problems"],
    },
    "solution_list": {
        "type": "object",
        "properties": {"solutions": {"type": "array", "items": _SOLUTION_OBJECT, "minItems": 1}},
        "required": ["solutions"],
    },
    "storyboard_outline": {
        "type": "object",
        "properties": {
            "title": _STRING,
            "frames": {"type": "array", "items": _FRAME_OUTLINE_OBJECT, "minItems": 4},
        },
        "required": ["title", "frames"],
    },
    "storyboard_image_prompts": {
        "type": "object",
        "properties": {
            "imagePrompts": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"imagePrompt": _STRING, "imageNegativePrompt": _STRING},
                    "required": ["imagePrompt", "imageNegativePrompt"],
                },
                "minItems": 1,
            }
        },
        "required": ["imagePrompts"],
    },
    "image_prompt": {
        "type": "object",
        "properties": {"imagePrompt": _STRING, "imageNegativePrompt": _STRING},
        "required": ["imagePrompt", "imageNegativePrompt"],
    },
    "character_description": {
        "type": "object",
        "properties": {"characterName": _STRING, "description": _STRING},
        "required": ["characterName", "description"],
    },
    "feedback_list": {
        "type": "object",
        "properties": {"questions": {"type": "array", "items": _STRING, "minItems": 1}},
        "required": ["questions"],
    },
    "suggestion_list": {
        "type": "object",
        "properties": {"suggestions": {"type": "array", "items": _STRING}},
        "required": ["suggestions"],
    },
}


def _load_corpus() -> dict[str, PromptTemplate]:
    corpus: dict[str, PromptTemplate] = {}
    root = resources.files("designflow").joinpath("templates")
    for name, schema_name in _SCHEMA_FOR_TEMPLATE.items():
        raw = root.joinpath(f"{name}.txt").read_text(encoding="utf-8")
        body = raw[:-1] if raw.endswith("\n") else raw
        placeholders = tuple(dict.fromkeys(_PLACEHOLDER_RE.findall(body)))
        corpus[name] = PromptTemplate(
            name=name,
            body=body,
            required_bindings=placeholders,
            response_schema_name=schema_name,
        )
    return corpus


_CORPUS: dict[str, PromptTemplate] | None = None


def template_corpus() -> dict[str, PromptTemplate]:
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = _load_corpus()
    return _CORPUS


def get_template(name: str) -> PromptTemplate:
    try:
        return template_corpus()[name]
    except KeyError:
        raise UnknownTemplateError(f"unknown template {name!r}") from None


def bindings_digest(bindings: Mapping[str, Any]) -> str:
    canonical = json.dumps({k: str(v) for k, v in bindings.items()}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def render_template(name: str, bindings: Mapping[str, Any]) -> RenderedPrompt:
    """Substitute every ``{placeholder}`` of the named template in one pass.

    Values are inserted verbatim (stringified); nothing else in the body is
    touched, so braces inside binding values cannot be re-expanded.
    """
    template = get_template(name)
    missing = [b for b in template.required_bindings if b not in bindings]
    if missing:
        raise MissingBindingError(f"template {name!r} missing binding(s): {', '.join(missing)}")

    def substitute(match: re.Match[str]) -> str:
        return str(bindings[match.group(1)])

    text = _PLACEHOLDER_RE.sub(substitute, template.body)
    return RenderedPrompt(
        template_name=name,
        text=text,
        response_schema_name=template.response_schema_name,
        bindings_digest=bindings_digest(bindings),
    )


def render_system_prompt(schema_name: str) -> str:
    """The response-format wrapper sent as the system prompt of every text call."""
    schema = RESPONSE_SCHEMAS[schema_name]
    return render_template(
        "enforce_json_schema",
        {"jsonSchema": json.dumps(schema, indent=2, sort_keys=True)},
    ).text


def corpus_checksums() -> dict[str, str]:
    """sha256 of every corpus file, for pinning the shipped corpus text in tests."""
    root = resources.files("designflow").joinpath("templates")
    out = {}
    for name in _SCHEMA_FOR_TEMPLATE:
        data = root.joinpath(f"{name}.txt").read_bytes()
        out[name] = hashlib.sha256(data).hexdigest()
    return out

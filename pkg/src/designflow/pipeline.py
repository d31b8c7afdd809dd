"""Generation flows: brainstorm chains, more/next ideas, storyboards, images.

Every text call goes through one funnel: render the template, wrap it with
the response-format system prompt, call the provider, validate the result
against the template's response schema. Provider output that fails schema
validation is surfaced with the raw payload attached for debugging.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field as dc_field
from typing import TYPE_CHECKING, Any, Mapping, Sequence

import jsonschema

from .artifacts import (
    ArtifactContent,
    ArtifactKind,
    ContextContent,
    Frame,
    FrameType,
    PersonaContent,
    ProblemContent,
    SolutionContent,
    StoryboardContent,
    STAGE_ORDER,
    VisualCharacterDescription,
    content_for_prompt,
    content_from_dict,
    content_title,
)
from .errors import (
    PreconditionError,
    ProviderError,
    SchemaViolationError,
    UnknownStyleError,
)
from .graph import CreatedBy, Edge, Node, NodeId
from .prompts import RESPONSE_SCHEMAS, render_system_prompt, render_template
from .providers import DEFAULT_STYLES, ModelProvider

if TYPE_CHECKING:
    from .workspace import Workspace

logger = logging.getLogger(__name__)

STYLE_REGISTRY: set[str] = set(DEFAULT_STYLES)

# Per-kind wiring of generate/regenerate templates and response payloads.
_KIND_TEMPLATES = {
    ArtifactKind.PERSONA: ("generate_personas", "regenerate_personas", "personas"),
    ArtifactKind.PROBLEM: ("generate_problems", "regenerate_problems", "problems"),
    ArtifactKind.SOLUTION: ("generate_solutions", "regenerate_solutions", "solutions"),
}

_PLURAL = {
    ArtifactKind.PERSONA: "personas",
    ArtifactKind.PROBLEM: "problems",
    ArtifactKind.SOLUTION: "solutions",
    ArtifactKind.STORYBOARD: "storyboards",
}

# Brainstorm panel labels for per-stage guidance text.
_GUIDANCE_LABEL = {
    ArtifactKind.PERSONA: "Persona ideas",
    ArtifactKind.PROBLEM: "Problem ideas",
    ArtifactKind.SOLUTION: "Solution ideas",
    ArtifactKind.STORYBOARD: "Storyboard description",
}

_COLUMN_GAP = 340.0
_ROW_GAP = 280.0


def _pretty(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, indent=2, sort_keys=True)


def join_phrases(parts: Sequence[str]) -> str:
    if len(parts) <= 1:
        return parts[0] if parts else ""
    if len(parts) == 2:
        return f"{parts[0]} and {parts[1]}"
    return ", ".join(parts[:-1]) + f", and {parts[-1]}"


@dataclass
class BrainstormSpec:
    """What to generate in one brainstorm run: chains up to a target stage."""

    target_stage: ArtifactKind
    design_context: str
    stage_guidance: dict[ArtifactKind, str] = dc_field(default_factory=dict)
    number_of_variations: int = 3

    def __post_init__(self) -> None:
        if self.target_stage not in STAGE_ORDER:
            raise PreconditionError(f"cannot brainstorm up to {self.target_stage.value}")
        if self.number_of_variations < 1:
            raise PreconditionError("numberOfVariations must be at least 1")


@dataclass
class BrainstormResult:
    context_node: NodeId
    nodes: list[NodeId]
    edges: list[Edge]
    storyboard: NodeId | None = None


@dataclass
class GenerateNextResult:
    nodes: list[NodeId]
    edges: list[Edge]


class GenerationPipeline:
    """Session-bound generation flows against one workspace and one provider."""

    def __init__(self, workspace: "Workspace", provider: ModelProvider):
        self.workspace = workspace
        self.provider = provider

    # -- provider funnel -------------------------------------------------

    def _complete(self, template_name: str, bindings: Mapping[str, Any]) -> Any:
        rendered = render_template(template_name, bindings)
        system_prompt = render_system_prompt(rendered.response_schema_name)
        value = self.provider.complete_json(
            system_prompt,
            rendered.text,
            rendered.response_schema_name,
            template_name=template_name,
            bindings=bindings,
        )
        schema = RESPONSE_SCHEMAS[rendered.response_schema_name]
        try:
            jsonschema.validate(value, schema)
        except jsonschema.ValidationError as exc:
            raise SchemaViolationError(
                f"provider response for {template_name!r} violates schema "
                f"{rendered.response_schema_name!r}: {exc.message}",
                raw_payload=value,
            ) from exc
        return value

    # -- kind-level generate/regenerate -----------------------------------

    def generate_for_kind(self, kind: ArtifactKind, context: str, n: int) -> list[ArtifactContent]:
        if kind not in _KIND_TEMPLATES:
            raise PreconditionError(f"cannot bulk-generate {kind.value} content")
        if n < 1:
            raise PreconditionError("numberOfVariations must be at least 1")
        template, _, payload_key = _KIND_TEMPLATES[kind]
        value = self._complete(template, {"numberOfVariations": n, "context": context})
        items = value[payload_key]
        if len(items) < n:
            raise ProviderError(
                f"asked for {n} {payload_key}, provider returned {len(items)}", raw_payload=value
            )
        return [content_from_dict(kind, item) for item in items[:n]]

    def regenerate_for_kind(
        self, kind: ArtifactKind, contents: Sequence[ArtifactContent], context: str
    ) -> list[ArtifactContent]:
        if kind not in _KIND_TEMPLATES:
            raise PreconditionError(f"cannot regenerate {kind.value} content with a list template")
        _, template, payload_key = _KIND_TEMPLATES[kind]
        bindings = {
            payload_key: _pretty([content_for_prompt(c) for c in contents]),
            "context": context,
        }
        value = self._complete(template, bindings)
        items = value[payload_key]
        if len(items) != len(contents):
            raise ProviderError(
                f"regeneration changed cardinality: {len(contents)} in, {len(items)} out",
                raw_payload=value,
            )
        out: list[ArtifactContent] = []
        for original, item in zip(contents, items):
            regenerated = content_from_dict(kind, item)
            if getattr(regenerated, "image", None) is None:
                regenerated.image = getattr(original, "image", None)
            out.append(regenerated)
        return out

    def generate_personas(self, context: str, n: int) -> list[PersonaContent]:
        return self.generate_for_kind(ArtifactKind.PERSONA, context, n)

    def regenerate_personas(self, personas: Sequence[PersonaContent], context: str) -> list[PersonaContent]:
        return self.regenerate_for_kind(ArtifactKind.PERSONA, personas, context)

    def generate_problems(self, context: str, n: int) -> list[ProblemContent]:
        return self.generate_for_kind(ArtifactKind.PROBLEM, context, n)

    def regenerate_problems(self, problems: Sequence[ProblemContent], context: str) -> list[ProblemContent]:
        return self.regenerate_for_kind(ArtifactKind.PROBLEM, problems, context)

    def generate_solutions(self, context: str, n: int) -> list[SolutionContent]:
        return self.generate_for_kind(ArtifactKind.SOLUTION, context, n)

    def regenerate_solutions(self, solutions: Sequence[SolutionContent], context: str) -> list[SolutionContent]:
        return self.regenerate_for_kind(ArtifactKind.SOLUTION, solutions, context)

    # -- node-level regeneration (shared by propagation / feedback / revise)

    def regenerate_node_content(
        self,
        node: Node,
        instruction: str,
        neighbor_nodes: Sequence[Node] = (),
    ) -> ArtifactContent:
        """Regenerate one node's content from an instruction plus neighbor
        context; storyboards rebuild through the full three-phase pipeline."""
        if node.kind is ArtifactKind.CONTEXT:
            raise PreconditionError("context nodes carry no generated content")
        if node.kind is ArtifactKind.STORYBOARD:
            return self._rebuild_storyboard(node, instruction, neighbor_nodes)
        context = self._regeneration_context(node.kind, instruction, neighbor_nodes)
        return self.regenerate_for_kind(node.kind, [node.content], context)[0]

    def _regeneration_context(
        self, target_kind: ArtifactKind, instruction: str, neighbors: Sequence[Node]
    ) -> str:
        groups = self._group_by_kind(neighbors)
        parts: list[str] = []
        if groups:
            kinds = join_phrases([_PLURAL[k] for k in STAGE_ORDER if k in groups])
            parts.append(f"Regenerating {_PLURAL[target_kind]} based on updated {kinds}.")
            for kind in STAGE_ORDER:
                if kind in groups:
                    block = _pretty([content_for_prompt(n.content) for n in groups[kind]])
                    parts.append(f'{_PLURAL[kind].capitalize()}: """\n{block}\n"""')
        if instruction:
            parts.append(instruction)
        return "\n\n".join(parts)

    @staticmethod
    def _group_by_kind(nodes: Sequence[Node]) -> dict[ArtifactKind, list[Node]]:
        groups: dict[ArtifactKind, list[Node]] = {}
        for node in nodes:
            groups.setdefault(node.kind, []).append(node)
        return groups

    # -- generate more / next ----------------------------------------------

    def generate_more(
        self, selected: Sequence[Node], guidance: str | None, n: int
    ) -> list[ArtifactContent]:
        if not selected:
            raise PreconditionError("generate-more needs at least one selected node")
        kinds = {node.kind for node in selected}
        if len(kinds) > 1:
            raise PreconditionError("generate-more requires nodes of a single kind")
        kind = kinds.pop()
        if kind not in _KIND_TEMPLATES:
            raise PreconditionError(f"generate-more is not available for {kind.value} nodes")
        block = _pretty([content_for_prompt(node.content) for node in selected])
        context = f"Selected {_PLURAL[kind]} (generate ideas that differ from these):\n{block}"
        if guidance:
            context += f"\n\nGuidance: {guidance}"
        return self.generate_for_kind(kind, context, n)

    def suggest_generation_guidance(self, selected: Sequence[Node], *, differ: bool) -> list[str]:
        """Autocomplete tags for the generate-more / generate-next panels."""
        if not selected:
            raise PreconditionError("suggestions need at least one selected node")
        kinds = {node.kind for node in selected}
        kind = selected[0].kind
        if differ:
            template = {
                ArtifactKind.PERSONA: "generate_more_personas_recommendations",
                ArtifactKind.PROBLEM: "generate_more_problems_recommendations",
                ArtifactKind.SOLUTION: "generate_more_solutions_recommendations",
                ArtifactKind.STORYBOARD: "generate_more_storyboard_recommendations",
            }.get(kind)
        else:
            template = {
                ArtifactKind.PERSONA: "generate_problems_recommendations",
                ArtifactKind.PROBLEM: "generate_solution_recommendations",
                ArtifactKind.SOLUTION: "generate_dependent_storyboard_recommendations",
            }.get(kind)
        if template is None or len(kinds) > 1:
            raise PreconditionError("no suggestion template for this selection")
        block = _pretty([content_for_prompt(node.content) for node in selected])
        value = self._complete(template, {"nodes": block})
        return list(value["suggestions"])

    def generate_next_nodes(
        self, selected: Sequence[Node], guidance: str | None, n: int
    ) -> GenerateNextResult:
        """Create n nodes of the next stage, wired from every selected node
        to every generated node."""
        if not selected:
            raise PreconditionError("generate-next needs at least one selected node")
        if n < 1:
            raise PreconditionError("must generate at least one node")
        stages = {node.kind.stage for node in selected}
        if None in stages:
            raise PreconditionError("context nodes cannot generate next-stage nodes")
        if ArtifactKind.STORYBOARD in {node.kind for node in selected}:
            raise PreconditionError("storyboard nodes have no next stage")
        if len(stages) > 1:
            target = ArtifactKind.STORYBOARD
        else:
            target = STAGE_ORDER[stages.pop() + 1]

        base_x = sum(node.position[0] for node in selected) / len(selected)
        base_y = max(node.position[1] for node in selected) + _ROW_GAP
        positions = [(base_x + (i - (n - 1) / 2) * _COLUMN_GAP, base_y) for i in range(n)]

        created: list[NodeId] = []
        if target is ArtifactKind.STORYBOARD:
            for i in range(n):
                content = self.build_storyboard_from_nodes(selected, guidance)
                created.append(self._create_node(target, content, positions[i]))
        else:
            block = _pretty([content_for_prompt(node.content) for node in selected])
            context = f"Based on the following {join_phrases(sorted({_PLURAL[n.kind] for n in selected}))}:\n{block}"
            if guidance:
                context += f"\n\nGuidance: {guidance}"
            for i, content in enumerate(self.generate_for_kind(target, context, n)):
                created.append(self._create_node(target, content, positions[i]))

        edges: list[Edge] = []
        for source in selected:
            for node_id in created:
                edges.append(self.workspace.graph.connect(source.id, node_id).edge)
        # A freshly generated node is already consistent with its sources.
        for node_id in created:
            self.workspace.graph.clear_mark(node_id)
        self.workspace.log(
            "GeneratedNext",
            sources=[node.id for node in selected],
            nodes=created,
            kind=target.value,
            edgeCount=len(edges),
        )
        return GenerateNextResult(nodes=created, edges=edges)

    def _create_node(
        self, kind: ArtifactKind, content: ArtifactContent, position: tuple[float, float]
    ) -> NodeId:
        node_id = self.workspace.new_node_id()
        self.workspace.graph.add_node(node_id, kind, content, position, CreatedBy.GENERATED)
        self.workspace.log("NodeCreated", node=node_id, kind=kind.value, createdBy="Generated")
        return node_id

    # -- brainstorm ----------------------------------------------------------

    def run_brainstorm(self, spec: BrainstormSpec) -> BrainstormResult:
        """One context node plus n parallel persona->problem->solution chains
        up to the target stage; a storyboard caps the first chain if asked."""
        n = spec.number_of_variations
        target_stage = spec.target_stage.stage or 0
        width = (n - 1) * _COLUMN_GAP

        context_id = self._create_node(
            ArtifactKind.CONTEXT,
            ContextContent(label=spec.design_context),
            (width / 2, -_ROW_GAP),
        )

        result = BrainstormResult(context_node=context_id, nodes=[], edges=[])
        personas = self.generate_personas(
            self._stage_context(spec, ArtifactKind.PERSONA, None), n
        )
        chain_heads: list[NodeId] = []
        for i, persona in enumerate(personas):
            node_id = self._create_node(ArtifactKind.PERSONA, persona, (i * _COLUMN_GAP, 0.0))
            chain_heads.append(node_id)
            result.nodes.append(node_id)

        previous = chain_heads
        for kind, row in ((ArtifactKind.PROBLEM, 1), (ArtifactKind.SOLUTION, 2)):
            if target_stage < row:
                break
            current: list[NodeId] = []
            for i, upstream_id in enumerate(previous):
                upstream = self.workspace.graph.node(upstream_id)
                context = self._stage_context(spec, kind, upstream)
                content = self.generate_for_kind(kind, context, 1)[0]
                node_id = self._create_node(kind, content, (i * _COLUMN_GAP, row * _ROW_GAP))
                edge = self.workspace.graph.connect(upstream_id, node_id).edge
                self.workspace.graph.clear_mark(node_id)
                current.append(node_id)
                result.nodes.append(node_id)
                result.edges.append(edge)
            previous = current

        if spec.target_stage is ArtifactKind.STORYBOARD:
            first_solution = self.workspace.graph.node(previous[0])
            chain = [self.workspace.graph.node(nid) for nid in
                     self.workspace.graph.upstream_closure(first_solution.id)] + [first_solution]
            content = self.build_storyboard_from_nodes(
                chain, spec.stage_guidance.get(ArtifactKind.STORYBOARD)
            )
            sb_id = self._create_node(
                ArtifactKind.STORYBOARD, content, (0.0, 3 * _ROW_GAP)
            )
            edge = self.workspace.graph.connect(first_solution.id, sb_id).edge
            self.workspace.graph.clear_mark(sb_id)
            result.nodes.append(sb_id)
            result.edges.append(edge)
            result.storyboard = sb_id
            self.workspace.log("StoryboardBuilt", node=sb_id, frames=len(content.frames))

        self.workspace.log(
            "Brainstormed",
            context=spec.design_context,
            contextNode=context_id,
            targetStage=spec.target_stage.value,
            nodes=len(result.nodes) + 1,
            edges=len(result.edges),
        )
        return result

    def _stage_context(
        self, spec: BrainstormSpec, kind: ArtifactKind, upstream: Node | None
    ) -> str:
        parts = [f"Design context: {spec.design_context}"]
        guidance = spec.stage_guidance.get(kind)
        if guidance:
            parts.append(f"{_GUIDANCE_LABEL[kind]}: {guidance}")
        if upstream is not None:
            block = _pretty(content_for_prompt(upstream.content))
            parts.append(f"{upstream.kind.value}: {block}")
        return "\n\n".join(parts)

    # -- character descriptions ----------------------------------------------

    def generate_visual_character_description(
        self, content: ArtifactContent
    ) -> VisualCharacterDescription:
        """Get-or-create the reusable description for this idea's character;
        at most one provider call per character name."""
        if isinstance(content, (StoryboardContent, ContextContent)):
            raise PreconditionError("character descriptions come from persona/problem/solution ideas")
        name = content_title(content) or "Unnamed character"
        existing = self.workspace.descriptions.get(name)
        if existing is not None:
            return existing
        value = self._complete(
            "generate_visual_character_descriptions",
            {"idea": _pretty(content_for_prompt(content))},
        )
        description = VisualCharacterDescription(
            character_name=value["characterName"], description=value["description"]
        )
        self.workspace.descriptions[name] = description
        return description

    def lineage_descriptions(self, node: Node) -> list[VisualCharacterDescription]:
        """Stored descriptions for personas upstream of (or equal to) a node."""
        names: list[str] = []
        if node.kind is ArtifactKind.PERSONA:
            names.append(content_title(node.content))
        for nid in self.workspace.graph.upstream_closure(node.id):
            upstream = self.workspace.graph.node(nid)
            if upstream.kind is ArtifactKind.PERSONA:
                names.append(content_title(upstream.content))
        out = []
        for name in dict.fromkeys(names):
            if name in self.workspace.descriptions:
                out.append(self.workspace.descriptions[name])
        return out

    # -- storyboard pipeline ---------------------------------------------------

    def build_storyboard(
        self,
        inputs: Mapping[ArtifactKind, Sequence[ArtifactContent]],
        descriptions: Sequence[VisualCharacterDescription],
        style: str,
        guidance: str | None = None,
        regeneration_note: str | None = None,
    ) -> StoryboardContent:
        """Three ordered phases: outline, one image-prompt call for all
        frames, then one image call per frame. Per-frame image failures leave
        that frame's image unset; prompts and captions survive for retry."""
        if style not in STYLE_REGISTRY:
            raise UnknownStyleError(f"unknown image style {style!r}")
        solutions = inputs.get(ArtifactKind.SOLUTION, ())
        if not solutions:
            raise PreconditionError("a storyboard needs at least one solution input")

        context_parts: list[str] = []
        if regeneration_note:
            context_parts.append(regeneration_note)
        for kind in (ArtifactKind.PERSONA, ArtifactKind.PROBLEM, ArtifactKind.SOLUTION):
            contents = inputs.get(kind, ())
            block = _pretty([content_for_prompt(c) for c in contents])
            context_parts.append(f'{_PLURAL[kind].capitalize()}: """\n{block}\n"""')
        if guidance:
            context_parts.append(f"Storyboard description: {guidance}")

        outline = self._complete("generate_storyboard_outline", {"context": "\n\n".join(context_parts)})
        frames_outline = outline["frames"]

        prompt_value = self._complete(
            "generate_storyboard_image_prompts",
            {
                "numFrames": len(frames_outline),
                "frames": _pretty(frames_outline),
                "visualCharacterDescriptions": _pretty([d.to_dict() for d in descriptions]),
            },
        )
        image_prompts = prompt_value["imagePrompts"]
        if len(image_prompts) < len(frames_outline):
            raise ProviderError(
                f"expected {len(frames_outline)} image prompts, got {len(image_prompts)}",
                raw_payload=prompt_value,
            )

        frames: list[Frame] = []
        for frame_outline, prompt in zip(frames_outline, image_prompts):
            frame = Frame(
                frame_type=FrameType(frame_outline["frameType"]),
                description=frame_outline["description"],
                caption=frame_outline["caption"],
                image_prompt=prompt["imagePrompt"],
                image_negative_prompt=prompt["imageNegativePrompt"],
            )
            try:
                frame.image = self.provider.generate_image(
                    frame.image_prompt, frame.image_negative_prompt, style
                )
            except ProviderError as exc:
                logger.warning("image generation failed for frame %d: %s", len(frames), exc)
            frames.append(frame)

        return StoryboardContent(title=outline["title"], frames=frames, style=style)

    def build_storyboard_from_nodes(
        self, sources: Sequence[Node], guidance: str | None = None, style: str | None = None
    ) -> StoryboardContent:
        """Group source nodes by kind, ensure persona descriptions exist, build."""
        inputs: dict[ArtifactKind, list[ArtifactContent]] = {}
        for node in sources:
            if node.kind in (ArtifactKind.PERSONA, ArtifactKind.PROBLEM, ArtifactKind.SOLUTION):
                inputs.setdefault(node.kind, []).append(node.content)
        descriptions = [
            self.generate_visual_character_description(content)
            for content in inputs.get(ArtifactKind.PERSONA, ())
        ]
        return self.build_storyboard(
            inputs, descriptions, style or self.workspace.settings.style, guidance
        )

    def _rebuild_storyboard(
        self, node: Node, instruction: str, neighbor_nodes: Sequence[Node]
    ) -> StoryboardContent:
        sources = list(neighbor_nodes)
        if not any(n.kind is ArtifactKind.SOLUTION for n in sources):
            sources = [
                self.workspace.graph.node(nid)
                for nid in self.workspace.graph.upstream_neighbors(node.id)
            ]
        existing: StoryboardContent = node.content
        groups = self._group_by_kind(sources)
        kinds = join_phrases([_PLURAL[k] for k in STAGE_ORDER if k in groups]) or "personas, problems, and solutions"
        note = f"Regenerating storyboards based on updated {kinds}."
        if instruction:
            note += f"\n\n{instruction}"
        inputs: dict[ArtifactKind, list[ArtifactContent]] = {
            kind: [n.content for n in nodes] for kind, nodes in groups.items()
        }
        descriptions = [
            self.generate_visual_character_description(content)
            for content in inputs.get(ArtifactKind.PERSONA, ())
        ] or self.lineage_descriptions(node)
        return self.build_storyboard(
            inputs, descriptions, existing.style, regeneration_note=note
        )

    # -- illustrative images -----------------------------------------------------

    def generate_illustrative_image(self, node: Node) -> str:
        """One text call for the prompt pair, one image call; problem nodes
        route through the empathy-building problem template."""
        if node.kind not in (ArtifactKind.PERSONA, ArtifactKind.PROBLEM, ArtifactKind.SOLUTION):
            raise PreconditionError(f"{node.kind.value} nodes have no illustrative image")
        idea = _pretty(content_for_prompt(node.content))
        if node.kind is ArtifactKind.PROBLEM:
            value = self._complete("generate_problem_illustrative_image_prompt", {"problem": idea})
        else:
            value = self._complete("generate_illustrative_image_prompt", {"idea": idea})
        prompt = value["imagePrompt"]
        descriptions = self.lineage_descriptions(node)
        if descriptions:
            prompt += " | Characters: " + "; ".join(d.description for d in descriptions)
        image = self.provider.generate_image(
            prompt, value["imageNegativePrompt"], self.workspace.settings.style
        )
        node.content.image = image
        return image

    def regenerate_frame_image(self, node_id: NodeId, frame_index: int) -> Frame:
        """Redraw a single frame from its (possibly edited) description: one
        image-prompt call scoped to that frame, then one image call."""
        node = self.workspace.graph.node(node_id)
        if node.kind is not ArtifactKind.STORYBOARD:
            raise PreconditionError("only storyboard frames can be regenerated")
        content: StoryboardContent = node.content
        if not 0 <= frame_index < len(content.frames):
            raise PreconditionError(f"frame index {frame_index} out of range")
        frame = content.frames[frame_index]
        outline = {
            "frameType": frame.frame_type.value,
            "description": frame.description,
            "caption": frame.caption,
        }
        descriptions = self.lineage_descriptions(node)
        value = self._complete(
            "generate_storyboard_image_prompts",
            {
                "numFrames": 1,
                "frames": _pretty([outline]),
                "visualCharacterDescriptions": _pretty([d.to_dict() for d in descriptions]),
            },
        )
        prompt = value["imagePrompts"][0]
        frame.image_prompt = prompt["imagePrompt"]
        frame.image_negative_prompt = prompt["imageNegativePrompt"]
        frame.image = self.provider.generate_image(
            frame.image_prompt, frame.image_negative_prompt, content.style
        )
        self.workspace.log(
            "ImagesRegenerated", node=node_id, style=content.style,
            frames=1, frameIndex=frame_index,
        )
        return frame

    def regenerate_images(self, node_id: NodeId, style: str) -> StoryboardContent:
        """Redraw every frame with its existing prompts in a new style;
        prompts and captions stay byte-identical."""
        if style not in STYLE_REGISTRY:
            raise UnknownStyleError(f"unknown image style {style!r}")
        node = self.workspace.graph.node(node_id)
        if node.kind is not ArtifactKind.STORYBOARD:
            raise PreconditionError("only storyboards support regenerate-all images")
        content: StoryboardContent = node.content
        failures = 0
        for i, frame in enumerate(content.frames):
            try:
                frame.image = self.provider.generate_image(
                    frame.image_prompt, frame.image_negative_prompt, style
                )
            except ProviderError as exc:
                failures += 1
                logger.warning("image regeneration failed for frame %d: %s", i, exc)
        content.style = style
        self.workspace.log(
            "ImagesRegenerated", node=node_id, style=style,
            frames=len(content.frames), failures=failures,
        )
        return content

"""Generation flows against the deterministic mock provider."""

import pytest

from designflow.artifacts import (
    ArtifactKind,
    PersonaContent,
    ProblemContent,
    SolutionContent,
    validate_content,
)
from designflow.errors import (
    PreconditionError,
    ProviderError,
    SchemaViolationError,
    UnknownStyleError,
)
from designflow.pipeline import BrainstormSpec
from designflow.providers import MockModelProvider
from designflow.session import DesignSession


@pytest.fixture()
def session():
    return DesignSession.create_workspace("t", seed=3)


def text_calls(session, name):
    return session.provider.trace.count(name)


class TestGeneratePersonas:
    def test_sustainability_includes_eco_emily(self, session):
        personas = session.pipeline.generate_personas("sustainability in cities", 3)
        assert any(p.name == "Eco Emily" for p in personas)

    def test_exact_count(self, session):
        assert len(session.pipeline.generate_personas("anything", 1)) == 1
        assert len(session.pipeline.generate_personas("anything", 5)) == 5

    def test_all_validate(self, session):
        for persona in session.pipeline.generate_personas("remote work", 4):
            assert validate_content(ArtifactKind.PERSONA, persona).complete

    def test_regenerate_preserves_count(self, session):
        personas = [PersonaContent(name="A One"), PersonaContent(name="B Two")]
        out = session.pipeline.regenerate_personas(
            personas, "regenerating personas based on updated problems"
        )
        assert len(out) == 2

    def test_zero_count_rejected(self, session):
        with pytest.raises(PreconditionError):
            session.pipeline.generate_problems("x", 0)

    def test_deterministic_across_calls(self, session):
        a = session.pipeline.generate_personas("gardening", 3)
        b = session.pipeline.generate_personas("gardening", 3)
        assert a == b


class TestGenerateSolutions:
    def test_packaging_problem_yields_plant_based(self, session):
        solutions = session.pipeline.generate_solutions(
            "Limited availability of sustainable packaging options in grocery stores", 3
        )
        assert any(s.title == "Plant-based Packaging" for s in solutions)


class TestGenerateMore:
    def test_gardening_canned_set(self, session):
        node = session.add_node(
            ArtifactKind.SOLUTION, SolutionContent(title="Urban Gardening Workshops")
        )
        contents = session.pipeline.generate_more([node], None, 4)
        assert [c.title for c in contents] == [
            "Community Clean-Up Drives",
            "Sustainable Living Clinics",
            "Recycling Awareness Programs",
            "Eco-Friendly Product Demos",
        ]

    def test_guidance_threaded_verbatim(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Gentle George"))
        session.pipeline.generate_more([node], "people who live in the same state (e.g., Austin, TX)", 2)
        last = [c for c in session.provider.trace.calls if c.kind == "text"][-1]
        assert last.name == "generate_personas"
        # the rendered prompt carried the guidance verbatim: re-render to check
        # via the recorded bindings digest is opaque, so assert via a stub
        # provider below instead; here just check the call happened once.
        assert text_calls(session, "generate_personas") == 1

    def test_storyboard_kind_rejected(self, session):
        spec = BrainstormSpec(ArtifactKind.STORYBOARD, "packaging")
        result = session.brainstorm(spec)
        sb = session.graph.node(result.storyboard)
        with pytest.raises(PreconditionError):
            session.pipeline.generate_more([sb], None, 2)

    def test_mixed_kinds_rejected(self, session):
        a = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="A"))
        b = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="B"))
        with pytest.raises(PreconditionError):
            session.pipeline.generate_more([a, b], None, 2)


class RecordingProvider(MockModelProvider):
    """Mock that also keeps every rendered user prompt for verbatim checks."""

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.user_prompts = []

    def complete_json(self, system_prompt, user_prompt, schema_name, **kwargs):
        self.user_prompts.append(user_prompt)
        return super().complete_json(system_prompt, user_prompt, schema_name, **kwargs)


class TestPromptThreading:
    def test_guidance_appears_verbatim_in_prompt(self):
        provider = RecordingProvider(seed=1)
        session = DesignSession.create_workspace("t", provider=provider, seed=1)
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Gentle George"))
        guidance = "people who live in the same state (e.g., Austin, TX)"
        session.pipeline.generate_more([node], guidance, 2)
        assert any(guidance in p for p in provider.user_prompts)

    def test_brainstorm_stage_guidance_in_persona_prompt(self):
        provider = RecordingProvider(seed=1)
        session = DesignSession.create_workspace("t", provider=provider, seed=1)
        guidance = "PhD students who publish at CHI, IUI, or UIST"
        session.brainstorm(
            BrainstormSpec(
                ArtifactKind.PERSONA,
                "research tooling",
                stage_guidance={ArtifactKind.PERSONA: guidance},
            )
        )
        assert any(guidance in p for p in provider.user_prompts)


class TestGenerateNext:
    def test_one_to_many(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Solo Sam"))
        result = session.generate_next([node.id], n=3)
        assert len(result.nodes) == 3
        assert len(result.edges) == 3
        assert all(session.graph.node(nid).kind is ArtifactKind.PROBLEM for nid in result.nodes)

    def test_many_to_many_edge_count(self, session):
        a = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="A One"))
        b = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="B Two"))
        result = session.generate_next([a.id, b.id], n=2)
        assert len(result.nodes) == 2
        assert len(result.edges) == 4

    def test_minimal_case(self, session):
        node = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="The problem"))
        result = session.generate_next([node.id], n=1)
        assert len(result.nodes) == 1
        assert len(result.edges) == 1
        assert session.graph.node(result.nodes[0]).kind is ArtifactKind.SOLUTION

    def test_storyboard_selection_rejected(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        with pytest.raises(PreconditionError):
            session.generate_next([result.storyboard], n=1)

    def test_empty_selection_rejected(self, session):
        with pytest.raises(PreconditionError):
            session.generate_next([], n=1)

    def test_generated_nodes_carry_no_marks(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Solo Sam"))
        result = session.generate_next([node.id], n=2)
        for nid in result.nodes:
            assert session.graph.node(nid).dirty is None


class TestGuidanceSuggestions:
    def test_differ_suggestions_for_selection(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Tag Tina"))
        tags = session.pipeline.suggest_generation_guidance([node], differ=True)
        assert tags and all(isinstance(t, str) for t in tags)
        assert session.provider.trace.count("generate_more_personas_recommendations") == 1

    def test_next_stage_suggestions(self, session):
        node = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="T"))
        session.pipeline.suggest_generation_guidance([node], differ=False)
        assert session.provider.trace.count("generate_solution_recommendations") == 1

    def test_mixed_selection_rejected(self, session):
        a = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="A"))
        b = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="B"))
        with pytest.raises(PreconditionError):
            session.pipeline.suggest_generation_guidance([a, b], differ=True)


class TestCharacterDescriptions:
    def test_description_mentions_name(self, session):
        vcd = session.pipeline.generate_visual_character_description(
            PersonaContent(name="Eco Emily")
        )
        assert "Eco Emily" in vcd.description

    def test_same_idea_twice_identical_and_cached(self, session):
        content = PersonaContent(name="Eco Emily")
        first = session.pipeline.generate_visual_character_description(content)
        calls_after_first = text_calls(session, "generate_visual_character_descriptions")
        second = session.pipeline.generate_visual_character_description(content)
        assert first == second
        assert text_calls(session, "generate_visual_character_descriptions") == calls_after_first == 1

    def test_downstream_reuse_no_new_call(self, session):
        persona = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Eco Emily"))
        problem = session.generate_next([persona.id], n=1).nodes[0]
        solution = session.generate_next([problem], n=1).nodes[0]
        session.pipeline.generate_visual_character_description(
            session.graph.node(persona.id).content
        )
        assert text_calls(session, "generate_visual_character_descriptions") == 1
        session.pipeline.generate_illustrative_image(session.graph.node(solution))
        assert text_calls(session, "generate_visual_character_descriptions") == 1


class TestStoryboardPipeline:
    def _inputs(self):
        return {
            ArtifactKind.PERSONA: [PersonaContent(name="Eco Emily")],
            ArtifactKind.PROBLEM: [ProblemContent(title="Hard to avoid plastic")],
            ArtifactKind.SOLUTION: [SolutionContent(title="Plant-based Packaging")],
        }

    def test_four_frames_in_narrative_order(self, session):
        content = session.pipeline.build_storyboard(self._inputs(), [], "comic-book")
        assert [f.frame_type.value for f in content.frames] == [
            "Context", "Problem", "Solution", "Resolution",
        ]

    def test_call_trace_shape(self, session):
        session.pipeline.build_storyboard(self._inputs(), [], "comic-book")
        trace = session.provider.trace
        assert trace.count("generate_storyboard_outline") == 1
        assert trace.count("generate_storyboard_image_prompts") == 1
        assert len(trace.image_calls()) == 4

    def test_title_is_summary_sentence(self, session):
        content = session.pipeline.build_storyboard(self._inputs(), [], "comic-book")
        assert content.title.endswith(".")
        assert " that " in content.title

    def test_under_four_frames_rejected_by_schema(self):
        provider = MockModelProvider(seed=0, outline_frames=3)
        session = DesignSession.create_workspace("t", provider=provider, seed=0)
        with pytest.raises(SchemaViolationError):
            session.pipeline.build_storyboard(
                {ArtifactKind.SOLUTION: [SolutionContent(title="S")]}, [], "comic-book"
            )

    def test_missing_solution_rejected(self, session):
        with pytest.raises(PreconditionError):
            session.pipeline.build_storyboard({}, [], "comic-book")

    def test_unknown_style_rejected_before_calls(self, session):
        with pytest.raises(UnknownStyleError):
            session.pipeline.build_storyboard(self._inputs(), [], "pointillism")
        assert not session.provider.trace.calls

    def test_character_names_in_image_prompts(self, session):
        descriptions = [
            session.pipeline.generate_visual_character_description(PersonaContent(name="Eco Emily"))
        ]
        content = session.pipeline.build_storyboard(self._inputs(), descriptions, "comic-book")
        assert all("Eco Emily" in f.image_prompt for f in content.frames)


class TestIllustrativeImages:
    def test_persona_one_text_one_image(self, session):
        node = session.add_node(ArtifactKind.PERSONA, PersonaContent(name="Eco Emily"))
        session.provider.trace.clear()
        ref = session.pipeline.generate_illustrative_image(session.graph.node(node.id))
        assert ref.startswith("mock://images/")
        assert len(session.provider.trace.text_calls()) == 1
        assert len(session.provider.trace.image_calls()) == 1
        assert session.graph.node(node.id).content.image == ref

    def test_problem_routes_to_problem_template(self, session):
        node = session.add_node(ArtifactKind.PROBLEM, ProblemContent(title="No options"))
        session.pipeline.generate_illustrative_image(session.graph.node(node.id))
        assert text_calls(session, "generate_problem_illustrative_image_prompt") == 1
        assert text_calls(session, "generate_illustrative_image_prompt") == 0

    def test_storyboard_rejected(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        with pytest.raises(PreconditionError):
            session.pipeline.generate_illustrative_image(session.graph.node(result.storyboard))


class TestRegenerateImages:
    def test_style_swap_counts_and_immutability(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        before = session.graph.node(result.storyboard).content
        captions = [f.caption for f in before.frames]
        prompts = [f.image_prompt for f in before.frames]
        session.provider.trace.clear()
        after = session.pipeline.regenerate_images(result.storyboard, "neon-punk")
        assert len(session.provider.trace.image_calls()) == len(after.frames)
        assert not session.provider.trace.text_calls()
        assert [f.caption for f in after.frames] == captions
        assert [f.image_prompt for f in after.frames] == prompts
        assert after.style == "neon-punk"

    def test_unknown_style_rejected(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        session.provider.trace.clear()
        with pytest.raises(UnknownStyleError):
            session.pipeline.regenerate_images(result.storyboard, "cubism")
        assert not session.provider.trace.calls

    def test_single_frame_regenerate(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        node = session.graph.node(result.storyboard)
        node.content.frames[1].description = "Back of Peter looking at the new tool"
        other_images = [f.image for i, f in enumerate(node.content.frames) if i != 1]
        session.provider.trace.clear()
        frame = session.pipeline.regenerate_frame_image(result.storyboard, 1)
        assert "Back of Peter" in frame.image_prompt
        assert len(session.provider.trace.text_calls()) == 1
        assert len(session.provider.trace.image_calls()) == 1
        assert [f.image for i, f in enumerate(node.content.frames) if i != 1] == other_images

    def test_frame_index_out_of_range(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "parks"))
        with pytest.raises(PreconditionError):
            session.pipeline.regenerate_frame_image(result.storyboard, 9)


class TestBrainstorm:
    def test_persona_only(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.PERSONA, "city parks", number_of_variations=3))
        assert len(result.nodes) == 3
        assert result.edges == []
        assert result.storyboard is None
        assert session.graph.node(result.context_node).kind is ArtifactKind.CONTEXT

    def test_full_chain_shape(self, session):
        result = session.brainstorm(BrainstormSpec(ArtifactKind.STORYBOARD, "Urban sustainability"))
        kinds = [session.graph.node(nid).kind for nid in result.nodes]
        assert kinds.count(ArtifactKind.PERSONA) == 3
        assert kinds.count(ArtifactKind.PROBLEM) == 3
        assert kinds.count(ArtifactKind.SOLUTION) == 3
        assert kinds.count(ArtifactKind.STORYBOARD) == 1
        assert len(result.edges) == 7

    def test_provider_failure_keeps_created_nodes(self):
        class FlakyProvider(MockModelProvider):
            def complete_json(self, *args, **kwargs):
                if kwargs.get("template_name") == "generate_solutions":
                    raise ProviderError("text model unavailable")
                return super().complete_json(*args, **kwargs)

        session = DesignSession.create_workspace("t", provider=FlakyProvider(seed=2), seed=2)
        with pytest.raises(ProviderError):
            session.brainstorm(BrainstormSpec(ArtifactKind.SOLUTION, "parks"))
        kinds = [n.kind for n in session.graph.nodes.values()]
        assert kinds.count(ArtifactKind.PERSONA) == 3
        assert kinds.count(ArtifactKind.PROBLEM) >= 1

"""Text/image model providers behind a two-method interface.

The mock provider is the workhorse for tests and offline use: deterministic
for a given seed and prompt bindings, stateless in its outputs, and it keeps
a call trace (template name + bindings digest) that oracle tests count. It
also ships canned outputs for the named examples the UI flows are built
around, so scripted sessions reproduce recognizable content.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Protocol

from .errors import ProviderError

DEFAULT_STYLES = ("comic-book", "neon-punk", "anime", "line-art")


class ModelProvider(Protocol):
    """Contract every provider satisfies; extra keyword metadata is optional
    and exists so traces can record which template produced a call."""

    def complete_json(
        self,
        system_prompt: str,
        user_prompt: str,
        schema_name: str,
        *,
        template_name: str | None = None,
        bindings: Mapping[str, Any] | None = None,
    ) -> Any: ...

    def generate_image(self, prompt: str, negative_prompt: str, style: str) -> str: ...


@dataclass(frozen=True)
class CallRecord:
    kind: str  # "text" | "image"
    name: str  # template name for text calls, "image" otherwise
    schema_name: str
    digest: str


@dataclass
class CallTrace:
    calls: list[CallRecord] = field(default_factory=list)

    def count(self, name: str) -> int:
        return sum(1 for c in self.calls if c.name == name)

    def text_calls(self) -> list[CallRecord]:
        return [c for c in self.calls if c.kind == "text"]

    def image_calls(self) -> list[CallRecord]:
        return [c for c in self.calls if c.kind == "image"]

    def clear(self) -> None:
        self.calls.clear()


def _digest(*parts: str) -> str:
    return hashlib.sha256("␟".join(parts).encode("utf-8")).hexdigest()


_PERSONA_POOL = [
    ("Practical Priya", "Chicago, IL"),
    ("Curious Carlos", "Denver, CO"),
    ("Diligent Dana", "Seattle, WA"),
    ("Mindful Maya", "Minneapolis, MN"),
    ("Gentle George", "Austin, TX"),
    ("Careful Cathy", "San Francisco, CA"),
    ("Busy Ben", "Boston, MA"),
    ("Thrifty Tina", "Atlanta, GA"),
    ("Organized Omar", "Phoenix, AZ"),
    ("Resourceful Rosa", "Columbus, OH"),
]

_ECO_EMILY = {
    "name": "Eco Emily",
    "location": "Portland, OR",
    "bio": "♻️ Zero-waste enthusiast who bikes to the farmers' market every weekend",
    "needs": "🛒 Easy ways to shop sustainably on a budget",
    "challenges": "Finding eco-friendly stores",
    "description": "Young professional who weaves sustainability into every daily routine",
}

_SARA = {
    "name": "Sustainability-Seeking Sara",
    "location": "Austin, TX",
    "bio": "🌎 Young professional who cares deeply about the environment",
    "needs": "🛍️ Eco-friendly packaging at her local grocery store",
    "challenges": "Struggles to find sustainable packaging when shopping",
    "description": "Wants her weekly grocery run to match her environmental values",
}

_PACKAGING_PROBLEM = {
    "title": "Limited availability of sustainable packaging options in grocery stores",
    "context": "🛒 Shoppers want to avoid plastic but find few alternatives on shelves",
    "stakeholders": "Shoppers, grocery retailers, packaging suppliers",
    "objectives": "Make sustainable packaging the easy default choice",
}

_FINANCE_PROBLEM = {
    "title": "Low Financial Literacy in Young Adults",
    "context": "💸 Young adults leave school without practical money skills",
    "stakeholders": "Young adults, educators, financial institutions",
    "objectives": "Help young adults build confident money habits",
}

_CREDIT_TOPICS_RESPONSE = "Credit management and debt accumulation"
_FINANCE_TITLE = "Low Financial Literacy in Young Adults"
_CREDIT_TITLE = "Financial Literacy on Credit Management in Young Adults"

_PACKAGING_SOLUTIONS = [
    {"title": "Plant-based Packaging", "problemsAddressed": "Plastic waste from everyday groceries",
     "keyFeatures": "🌱 Compostable wraps made from corn starch and cellulose",
     "benefits": "Cuts landfill waste without changing shopping habits"},
    {"title": "Reusable Packaging Programs", "problemsAddressed": "Single-use containers at checkout",
     "keyFeatures": "🔁 Deposit-based jars and totes returned at the store",
     "benefits": "Rewards repeat shoppers while eliminating throwaway packaging"},
    {"title": "Bulk-Bin Refill Stations", "problemsAddressed": "Pre-packaged goods shoppers cannot unwrap",
     "keyFeatures": "🫙 Self-serve dispensers for staples with container weighing",
     "benefits": "Lets shoppers buy exactly what they need, package-free"},
]

_GARDENING_MORE_SOLUTIONS = [
    {"title": "Community Clean-Up Drives", "problemsAddressed": "Neighborhood litter and disengagement",
     "keyFeatures": "🧹 Monthly volunteer events with supplied kits",
     "benefits": "Visible local impact that builds community pride"},
    {"title": "Sustainable Living Clinics", "problemsAddressed": "Lack of practical sustainability know-how",
     "keyFeatures": "🎓 Hands-on workshops led by local experts",
     "benefits": "Turns good intentions into everyday habits"},
    {"title": "Recycling Awareness Programs", "problemsAddressed": "Confusion about what can be recycled",
     "keyFeatures": "♻️ School visits, signage kits, and sorting games",
     "benefits": "Fewer contaminated bins and higher recycling rates"},
    {"title": "Eco-Friendly Product Demos", "problemsAddressed": "Hesitation to switch to green products",
     "keyFeatures": "🧼 In-store demo tables with trial samples",
     "benefits": "Lets shoppers try sustainable swaps risk-free"},
]

_BIODEGRADABLE_MORE_SOLUTIONS = [
    {"title": "Compostable Produce Bags", "problemsAddressed": "Thin plastic bags in the produce aisle",
     "keyFeatures": "🍃 Corn-starch film bags that break down in weeks",
     "benefits": "Same convenience, none of the plastic guilt"},
    {"title": "Mushroom-Based Protective Packaging", "problemsAddressed": "Foam fillers for fragile goods",
     "keyFeatures": "🍄 Mycelium molds grown to fit each product",
     "benefits": "Home-compostable cushioning that outperforms foam"},
    {"title": "Seaweed Film Wrappers", "problemsAddressed": "Cling wrap on fresh food",
     "keyFeatures": "🌊 Edible, dissolvable films from farmed seaweed",
     "benefits": "Zero-residue wrapping for delis and bakeries"},
]

_FINANCE_QUESTIONS = [
    "What current financial literacy initiatives are in place?",
    "Are there specific financial topics that young adults struggle with?",
    "How do young adults prefer to learn about money management?",
]

_REVISE_SUGGESTIONS = [
    "Partner with local schools for youth engagement",
    "Add a seasonal challenge to keep participants engaged",
    "Highlight cost savings for budget-conscious users",
]

_AUTOCOMPLETE_SUGGESTIONS = [
    "budget-friendly alternatives",
    "community-driven programs",
    "digital-first options",
    "low-effort daily habits",
]

_NEEDS_POOL = [
    "🕑 Quick wins that fit a packed schedule",
    "📱 Tools that work on the go",
    "🤝 A community that keeps them accountable",
    "💡 Clear guidance without jargon",
]
_CHALLENGE_POOL = [
    "Too many options and no time to compare them",
    "Hard to stay motivated after the first week",
    "Unsure which sources to trust",
    "Costs add up faster than expected",
]
_BIO_POOL = [
    "🏙️ City dweller balancing work and side projects",
    "🎓 Recent graduate figuring out adult routines",
    "👨‍👩‍👧 Parent juggling family logistics",
    "🚲 Commuter who plans everything in advance",
]

_REVISION_MARK = " ⟲ "


def _strip_revision(value: str) -> str:
    return value.split(_REVISION_MARK, 1)[0]


def _short_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:8]


def _parse_json_binding(bindings: Mapping[str, Any] | None, key: str) -> Any:
    if not bindings or key not in bindings:
        return None
    value = bindings[key]
    if isinstance(value, str):
        try:
            return json.loads(value)
        except json.JSONDecodeError:
            return None
    return value


_SECTION_RE = r'{label}: """\n(.*?)\n"""'


def _parse_section(text: str, label: str) -> Any:
    match = re.search(_SECTION_RE.format(label=label), text, re.DOTALL)
    if not match:
        return None
    try:
        return json.loads(match.group(1))
    except json.JSONDecodeError:
        return None


class MockModelProvider:
    """Deterministic stand-in for the text and image models.

    Outputs are a pure function of (seed, template, bindings); repeated calls
    with the same arguments return identical values and only append to the
    trace. ``outline_frames`` controls how many frames the storyboard outline
    pretends the model chose.
    """

    def __init__(self, seed: int = 0, outline_frames: int = 4):
        self.seed = seed
        self.outline_frames = outline_frames
        self.trace = CallTrace()

    # -- text ------------------------------------------------------------

    def complete_json(
        self,
        system_prompt: str,
        user_prompt: str,
        schema_name: str,
        *,
        template_name: str | None = None,
        bindings: Mapping[str, Any] | None = None,
    ) -> Any:
        name = template_name or schema_name
        digest = _digest(user_prompt)
        self.trace.calls.append(CallRecord("text", name, schema_name, digest[:16]))
        rng = random.Random(f"{self.seed}|{name}|{digest}")
        context = str((bindings or {}).get("context", user_prompt))

        if schema_name == "persona_list":
            return self._personas(name, context, bindings, rng)
        if schema_name == "problem_list":
            return self._problems(name, context, bindings, rng)
        if schema_name == "solution_list":
            return self._solutions(name, context, bindings, rng)
        if schema_name == "storyboard_outline":
            return self._outline(context)
        if schema_name == "storyboard_image_prompts":
            return self._image_prompts(bindings, user_prompt)
        if schema_name == "image_prompt":
            return self._illustrative_prompt(bindings, rng)
        if schema_name == "character_description":
            return self._character_description(bindings, rng)
        if schema_name == "feedback_list":
            return self._feedback(user_prompt, bindings)
        if schema_name == "suggestion_list":
            return self._suggestions(name)
        raise ProviderError(f"mock has no behavior for schema {schema_name!r}")

    # -- image -------------------------------------------------------------

    def generate_image(self, prompt: str, negative_prompt: str, style: str) -> str:
        digest = _digest(prompt, negative_prompt, style)
        self.trace.calls.append(CallRecord("image", "image", "", digest[:16]))
        return f"mock://images/{digest[:12]}-{style}.png"

    # -- per-schema behaviors ----------------------------------------------

    def _count(self, bindings: Mapping[str, Any] | None) -> int:
        try:
            return max(1, int((bindings or {}).get("numberOfVariations", 3)))
        except (TypeError, ValueError):
            return 3

    def _generic_persona(self, rng: random.Random, taken: set[str]) -> dict[str, str]:
        candidates = [p for p in _PERSONA_POOL if p[0] not in taken] or _PERSONA_POOL
        name, location = rng.choice(candidates)
        return {
            "name": name,
            "location": location,
            "bio": rng.choice(_BIO_POOL),
            "needs": rng.choice(_NEEDS_POOL),
            "challenges": rng.choice(_CHALLENGE_POOL),
            "description": f"{name.split()[1]} wants small changes that stick",
        }

    def _personas(self, name, context, bindings, rng) -> dict[str, Any]:
        if name == "regenerate_personas":
            items = _parse_json_binding(bindings, "personas") or []
            return {"personas": [self._revise_persona(p, context, rng) for p in items]}
        lowered = context.lower()
        canned: list[dict[str, str]] = []
        if "packaging" in lowered:
            canned = [dict(_SARA), dict(_ECO_EMILY)]
        elif "sustainab" in lowered:
            canned = [dict(_ECO_EMILY)]
        n = self._count(bindings)
        personas = canned[:n]
        taken = {p["name"] for p in personas}
        while len(personas) < n:
            persona = self._generic_persona(rng, taken)
            taken.add(persona["name"])
            personas.append(persona)
        return {"personas": personas}

    def _revise_persona(self, item: dict[str, str], context: str, rng) -> dict[str, str]:
        out = {k: item.get(k, "") for k in ("name", "location", "bio", "needs", "challenges", "description")}
        filler = self._generic_persona(rng, set())
        for key, value in filler.items():
            if not str(out.get(key, "")).strip():
                out[key] = value
        out["description"] = _strip_revision(out["description"]) + _REVISION_MARK + _short_digest(context)
        return out

    def _problems(self, name, context, bindings, rng) -> dict[str, Any]:
        if name == "regenerate_problems":
            items = _parse_json_binding(bindings, "problems") or []
            return {"problems": [self._revise_problem(p, context, rng) for p in items]}
        lowered = context.lower()
        canned = []
        if "financ" in lowered:
            canned = [dict(_FINANCE_PROBLEM)]
        elif "packaging" in lowered or "sustainab" in lowered or "eco emily" in lowered.replace("-", " "):
            canned = [dict(_PACKAGING_PROBLEM)]
        n = self._count(bindings)
        problems = canned[:n]
        while len(problems) < n:
            problems.append(self._generic_problem(rng))
        return {"problems": problems}

    def _generic_problem(self, rng: random.Random) -> dict[str, str]:
        barrier = rng.choice(["time", "cost", "trust", "access", "awareness"])
        group = rng.choice(["busy commuters", "new graduates", "local families", "first-time users"])
        return {
            "title": f"High {barrier} barriers keep {group} from getting started",
            "context": f"😓 {group.capitalize()} give up before seeing any benefit",
            "stakeholders": f"{group.capitalize()}, service providers, community groups",
            "objectives": f"Lower the {barrier} barrier for {group}",
        }

    def _revise_problem(self, item: dict[str, str], context: str, rng) -> dict[str, str]:
        out = {k: item.get(k, "") for k in ("title", "context", "stakeholders", "objectives")}
        filler = self._generic_problem(rng)
        for key, value in filler.items():
            if not str(out.get(key, "")).strip():
                out[key] = value
        if _CREDIT_TOPICS_RESPONSE.lower() in context.lower() and out["title"] == _FINANCE_TITLE:
            out["title"] = _CREDIT_TITLE
            out["context"] = "💳 Young adults struggle with credit management and debt accumulation"
            return out
        out["context"] = _strip_revision(out["context"]) + _REVISION_MARK + _short_digest(context)
        return out

    def _solutions(self, name, context, bindings, rng) -> dict[str, Any]:
        if name == "regenerate_solutions":
            items = _parse_json_binding(bindings, "solutions") or []
            return {"solutions": [self._revise_solution(s, context, rng) for s in items]}
        lowered = context.lower()
        canned = []
        if "urban gardening workshops" in lowered:
            canned = [dict(s) for s in _GARDENING_MORE_SOLUTIONS]
        elif "biodegradable" in lowered:
            canned = [dict(s) for s in _BIODEGRADABLE_MORE_SOLUTIONS]
        elif "packaging" in lowered or "sustainab" in lowered:
            canned = [dict(s) for s in _PACKAGING_SOLUTIONS]
        n = self._count(bindings)
        solutions = canned[:n]
        while len(solutions) < n:
            solutions.append(self._generic_solution(rng))
        return {"solutions": solutions}

    def _generic_solution(self, rng: random.Random) -> dict[str, str]:
        form = rng.choice(["Pop-up Workshops", "Starter Kits", "Buddy Matching", "Micro-Challenges", "Drop-in Clinics"])
        hook = rng.choice(["five-minute", "neighborhood", "seasonal", "beginner-friendly"])
        return {
            "title": f"{form} for {hook.capitalize()} Wins",
            "problemsAddressed": "People stall because getting started feels big",
            "keyFeatures": f"✨ {hook.capitalize()} {form.lower()} with ready-made materials",
            "benefits": "Momentum from the first day, no expertise required",
        }

    def _revise_solution(self, item: dict[str, str], context: str, rng) -> dict[str, str]:
        out = {k: item.get(k, "") for k in ("title", "problemsAddressed", "keyFeatures", "benefits")}
        filler = self._generic_solution(rng)
        for key, value in filler.items():
            if not str(out.get(key, "")).strip():
                out[key] = value
        out["benefits"] = _strip_revision(out["benefits"]) + _REVISION_MARK + _short_digest(context)
        return out

    def _outline(self, context: str) -> dict[str, Any]:
        personas = _parse_section(context, "Personas") or []
        problems = _parse_section(context, "Problems") or []
        solutions = _parse_section(context, "Solutions") or []
        persona = (personas[0].get("name") if personas else "") or "the user"
        problem = (problems[0].get("title") if problems else "") or "a daily frustration"
        solution = (solutions[0].get("title") if solutions else "") or "a new approach"
        title = f"A {solution.lower()} story that helps {persona} overcome {problem[0].lower() + problem[1:]}."

        count = self.outline_frames
        frames = []
        for i in range(count):
            if i == 0:
                frame_type, description, caption = (
                    "Context",
                    f"{persona} goes through an ordinary day, hinting at {problem[0].lower() + problem[1:]}.",
                    f"Meet {persona}.",
                )
            elif i == 1:
                frame_type, description, caption = (
                    "Problem",
                    f"{persona} runs into the problem directly: {problem}.",
                    f"The problem: {problem}.",
                )
            elif i == count - 1:
                frame_type, description, caption = (
                    "Resolution",
                    f"With {solution} in place, {persona} ends the day relieved and confident.",
                    f"A better day with {solution}.",
                )
            else:
                frame_type, description, caption = (
                    "Solution",
                    f"{persona} discovers {solution} and tries it out (step {i - 1}).",
                    f"Trying {solution}.",
                )
            frames.append({"frameType": frame_type, "description": description, "caption": caption})
        return {"title": title, "frames": frames}

    def _image_prompts(self, bindings, user_prompt: str) -> dict[str, Any]:
        frames = _parse_json_binding(bindings, "frames") or []
        descriptions = _parse_json_binding(bindings, "visualCharacterDescriptions") or []
        names = ", ".join(d.get("characterName", "") for d in descriptions if d.get("characterName"))
        shots = ["wide shot", "medium shot", "close-up"]
        prompts = []
        for i, frame in enumerate(frames):
            desc = frame.get("description", "a storyboard scene")
            subject = f"({shots[i % len(shots)]}:0.8) {desc}"
            if names:
                subject += f" featuring {names}"
            prompts.append({
                "imagePrompt": subject,
                "imageNegativePrompt": "blurry, distorted hands, text artifacts, watermark",
            })
        return {"imagePrompts": prompts}

    def _illustrative_prompt(self, bindings, rng) -> dict[str, Any]:
        idea = _parse_json_binding(bindings, "idea") or _parse_json_binding(bindings, "problem") or {}
        subject = idea.get("name") or idea.get("title") or "the idea"
        scene = rng.choice([
            "a sunlit market stall", "a cluttered desk at dusk", "a quiet neighborhood street",
            "a bright community hall",
        ])
        return {
            "imagePrompt": f"(illustration:0.9) {subject} as a visual metaphor, {scene}, soft natural light",
            "imageNegativePrompt": "photorealism, text, watermark, extra limbs",
        }

    def _character_description(self, bindings, rng) -> dict[str, Any]:
        idea = _parse_json_binding(bindings, "idea") or {}
        name = idea.get("name") or idea.get("title") or "The character"
        hair = rng.choice(["short dark hair", "curly auburn hair", "a neat gray bun", "a tidy fade"])
        outfit = rng.choice(["earth-tone jacket", "denim overalls", "smart-casual blazer", "weathered flannel"])
        prop = rng.choice(["a reusable tote bag", "a dog-eared notebook", "a steel water bottle", "round glasses"])
        return {
            "characterName": name,
            "description": f"{name} has {hair}, wears an {outfit}, and always carries {prop}.",
        }

    def _feedback(self, user_prompt: str, bindings) -> dict[str, Any]:
        if _FINANCE_TITLE in user_prompt:
            return {"questions": list(_FINANCE_QUESTIONS)}
        subject = "this idea"
        for key in ("persona", "problem", "solution", "storyboard", "nodes"):
            parsed = _parse_json_binding(bindings, key)
            if isinstance(parsed, dict):
                subject = parsed.get("name") or parsed.get("title") or subject
                break
            if isinstance(parsed, list) and parsed:
                subject = "these ideas"
                break
        return {
            "questions": [
                f"Who is most affected by {subject}, and how do we know?",
                f"What assumptions behind {subject} still need validation?",
                f"What would make {subject} fail in practice?",
            ]
        }

    def _suggestions(self, name: str) -> dict[str, Any]:
        if name == "revise_node_recommendations":
            return {"suggestions": list(_REVISE_SUGGESTIONS)}
        return {"suggestions": list(_AUTOCOMPLETE_SUGGESTIONS)}


class RealModelProvider:
    """Thin HTTP adapter for hosted text/image models, configured via env.

    Response handling is deliberately minimal: schema enforcement happens in
    the pipeline (which validates against the named schema), so this class
    only does transport and JSON extraction.
    """

    def __init__(
        self,
        text_url: str,
        text_key: str,
        image_url: str = "",
        image_key: str = "",
        text_model: str = "gpt-4o-mini",
        timeout: float = 60.0,
    ):
        self.text_url = text_url.rstrip("/")
        self.text_key = text_key
        self.image_url = image_url.rstrip("/")
        self.image_key = image_key
        self.text_model = text_model
        self.timeout = timeout

    def complete_json(
        self,
        system_prompt: str,
        user_prompt: str,
        schema_name: str,
        *,
        template_name: str | None = None,
        bindings: Mapping[str, Any] | None = None,
    ) -> Any:
        import httpx

        payload = {
            "model": self.text_model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "response_format": {"type": "json_object"},
        }
        try:
            response = httpx.post(
                f"{self.text_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.text_key}"},
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return json.loads(body["choices"][0]["message"]["content"])
        except Exception as exc:  # noqa: BLE001 - every transport failure maps to one error class
            raise ProviderError(f"text model call failed: {exc}", raw_payload=getattr(exc, "response", None)) from exc

    def generate_image(self, prompt: str, negative_prompt: str, style: str) -> str:
        import httpx

        try:
            response = httpx.post(
                f"{self.image_url}/generate",
                json={"prompt": prompt, "negative_prompt": negative_prompt, "style_preset": style},
                headers={"Authorization": f"Bearer {self.image_key}"},
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return body.get("url") or body.get("image") or ""
        except Exception as exc:  # noqa: BLE001
            raise ProviderError(f"image model call failed: {exc}") from exc


def make_provider(mode: str, seed: int = 0) -> ModelProvider:
    """Build a provider from the mode setting plus environment variables."""
    if mode.lower() == "mock":
        return MockModelProvider(seed=seed)
    text_url = os.environ.get("TEXT_MODEL_URL", "")
    text_key = os.environ.get("TEXT_MODEL_KEY", "")
    if not text_url:
        raise ProviderError("PROVIDER_MODE=real requires TEXT_MODEL_URL to be set")
    return RealModelProvider(
        text_url=text_url,
        text_key=text_key,
        image_url=os.environ.get("IMAGE_MODEL_URL", ""),
        image_key=os.environ.get("IMAGE_MODEL_KEY", ""),
    )

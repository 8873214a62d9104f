"""Loading and rendering of the externalized prompt templates.

Templates live in ``tonecap/templates/*.txt`` and use ``{name}`` placeholders.
A user may override any template by pointing a config's ``template_dir`` at a
directory containing a file of the same name.
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import TemplateError

#: Placeholder names a template is allowed to reference.
KNOWN_PLACEHOLDERS = frozenset(
    {"caption", "summary", "inventory", "spec", "prior_caption", "target", "extracted"}
)

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

TEMPLATE_FILES = (
    "extract_style",
    "extract_personality",
    "extract_informativeness",
    "extract_structural",
    "propose_style",
    "stage_infuse",
    "stage_refine",
    "judge_personality",
    "judge_style",
    "judge_fc",
    "binding_rules",
    "cot_instruction",
)


def load_template(name: str, template_dir: str | Path | None = None) -> str:
    if name not in TEMPLATE_FILES:
        raise TemplateError(f"no such template: {name!r}")
    if template_dir is not None:
        p = Path(template_dir) / f"{name}.txt"
        if p.exists():
            return p.read_text("utf-8")
    return _packaged(name)


@lru_cache(maxsize=None)
def _packaged(name: str) -> str:
    return resources.files("tonecap").joinpath(f"templates/{name}.txt").read_text("utf-8")


def render(template_text: str, values: dict[str, str], required: tuple[str, ...] = ()) -> str:
    """Substitute ``{name}`` placeholders.

    Raises TemplateError when the template references a placeholder outside
    ``KNOWN_PLACEHOLDERS`` (a typo), or when a placeholder listed in
    ``required`` does not appear in the template at all.
    """
    names = set(_PLACEHOLDER_RE.findall(template_text))
    unknown = names - KNOWN_PLACEHOLDERS
    if unknown:
        raise TemplateError(f"template references unknown placeholder(s): {sorted(unknown)}")
    missing = [r for r in required if r not in names]
    if missing:
        raise TemplateError(f"template is missing required placeholder(s): {missing}")

    def _sub(m: re.Match) -> str:
        name = m.group(1)
        if name not in values:
            raise TemplateError(f"no value supplied for placeholder {{{name}}}")
        return values[name]

    return _PLACEHOLDER_RE.sub(_sub, template_text)


@lru_cache(maxsize=1)
def instruction_templates() -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(caption templates, summarization templates) from the packaged data."""
    text = resources.files("tonecap").joinpath("data/instructions.json").read_text("utf-8")
    data = json.loads(text)
    return tuple(data["caption_templates"]), tuple(data["summary_templates"])


def binding_rules_block(spec_json: str, template_dir: str | Path | None = None) -> str:
    """The binding-rules sentence with the serialized spec substituted for {0}."""
    block = load_template("binding_rules", template_dir).rstrip("\n")
    if "{0}" not in block:
        raise TemplateError("binding_rules template must contain the {0} spec placeholder")
    return block.replace("{0}", spec_json)


def cot_instruction(template_dir: str | Path | None = None) -> str:
    return load_template("cot_instruction", template_dir).rstrip("\n")

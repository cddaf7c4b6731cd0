"""Backtranslation: regenerate SQL from a natural-language description.

The prompt is deliberately vanilla — schema tables and the description only,
no retrieved examples — so the result measures the information content of
the description itself.
"""

from __future__ import annotations

import re

from benchforge.generation.backends import CompletionBackend, GenerationParams
from benchforge.generation.prompts import build_backtranslation_prompt
from benchforge.sqlmodel.schema import SchemaCatalog

_FENCE_RE = re.compile(r"```(?:sql)?\n?(.*?)```", re.DOTALL)


def strip_code_fences(text: str) -> str:
    match = _FENCE_RE.search(text)
    if match:
        return match.group(1).strip()
    return text.strip()


def backtranslate(
    nl: str,
    catalog: SchemaCatalog,
    backend: CompletionBackend,
    params: GenerationParams | None = None,
) -> str:
    """First completion for the vanilla schema+description prompt."""
    if not nl.strip():
        raise ValueError("description must be non-empty")
    prompt = build_backtranslation_prompt(nl, catalog.tables if catalog else [])
    params = params or GenerationParams(n_candidates=1)
    texts = backend.complete(prompt, params)
    return strip_code_fences(texts[0]) if texts else ""

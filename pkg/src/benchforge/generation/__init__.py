"""Retrieval-augmented candidate generation."""

from benchforge.generation.backends import (
    CompletionBackend,
    GenerationParams,
    HttpChatBackend,
    MockBackend,
)
from benchforge.generation.candidates import (
    Candidate,
    generate_candidates,
    merge_descriptions,
)
from benchforge.generation.prompts import (
    PromptContext,
    build_backtranslation_prompt,
    build_prompt,
)

__all__ = [
    "Candidate",
    "CompletionBackend",
    "GenerationParams",
    "HttpChatBackend",
    "MockBackend",
    "PromptContext",
    "build_backtranslation_prompt",
    "build_prompt",
    "generate_candidates",
    "merge_descriptions",
]

"""Completion backends: the deterministic mock and a chat-completions client.

The mock derives its phrasing from the tables/columns present in the prompt
(by parsing the fenced SQL) and is fully determined by (prompt, seed), which
is what the reproducibility tests rely on. The HTTP client retries transport
failures 3 times with exponential backoff (1s/2s/4s).
"""

from __future__ import annotations

import hashlib
import os
import random
import re
import time
from dataclasses import dataclass
from typing import Callable, Protocol

from benchforge.errors import BackendError
from benchforge.generation import prompts as prompt_templates
from benchforge.generation.mock_language import describe_sql, nl_to_sql

ENV_LLM_URL = "BENCHFORGE_LLM_URL"
ENV_LLM_KEY = "BENCHFORGE_LLM_KEY"
ENV_LLM_MODEL = "BENCHFORGE_LLM_MODEL"


@dataclass
class GenerationParams:
    model_name: str = "mock"
    temperature: float = 0.0
    n_candidates: int = 4
    seed: int | None = None
    max_tokens: int = 256

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def to_json(self) -> dict:
        return {
            "model_name": self.model_name,
            "temperature": self.temperature,
            "n_candidates": self.n_candidates,
            "seed": self.seed,
            "max_tokens": self.max_tokens,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GenerationParams":
        return cls(**doc)


class CompletionBackend(Protocol):
    model_id: str

    def complete(self, prompt: str, params: GenerationParams) -> list[str]: ...


_VERBS = ["List", "Show", "Retrieve", "Return", "Fetch", "Report", "Display", "Find"]

_MERGE_TEMPLATES = [
    "First, {steps}. Putting these together, {final}",
    "Step by step: {steps}. Overall, {final}",
    "The query proceeds in stages: {steps}. In combination, {final}",
    "Taken in order, {steps}. As a whole, {final}",
    "Working inside out, {steps}. Altogether, {final}",
    "Broken down, {steps}. Combined, {final}",
    "In sequence, {steps}. Merged, {final}",
    "Stage by stage, {steps}. Finally, {final}",
]


class MockBackend:
    """Seeded template filler; identical (prompt, seed) gives identical output."""

    model_id = "mock-v1"

    def complete(self, prompt: str, params: GenerationParams) -> list[str]:
        rng = self._rng(prompt, params.seed)
        n = params.n_candidates
        if prompt.startswith(prompt_templates.BACKTRANSLATE_TASK):
            return self._backtranslate(prompt, n)
        if prompt.startswith(prompt_templates.MERGE_TASK):
            return self._merge(prompt, rng, n)
        return self._describe(prompt, rng, n)

    @staticmethod
    def _rng(prompt: str, seed: int | None) -> random.Random:
        digest = hashlib.sha256(
            f"{seed if seed is not None else 0}:{prompt}".encode("utf-8")
        ).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def _describe(self, prompt: str, rng: random.Random, n: int) -> list[str]:
        sql = _extract_fenced_sql(prompt)
        notes = _extract_guidance(prompt)
        body = describe_sql(sql) if sql else "nothing"
        verbs = _VERBS.copy()
        rng.shuffle(verbs)
        texts = []
        for i in range(n):
            verb = verbs[i % len(verbs)]
            text = f"{verb} {body}"
            if i >= len(verbs):
                text += f" (variation {i + 1})"
            if notes:
                text += f" (guidance: {notes[-1]})"
            texts.append(text + ".")
        return texts

    def _merge(self, prompt: str, rng: random.Random, n: int) -> list[str]:
        steps = _extract_steps(prompt)
        if not steps:
            return [f"Combined description {i + 1}." for i in range(n)]
        *sub, (final_name, final_nl) = steps
        if sub:
            step_text = "; then ".join(_declause(nl) for _, nl in sub)
        else:
            step_text = _declause(final_nl)
        final_text = _declause(final_nl)
        templates = _MERGE_TEMPLATES.copy()
        rng.shuffle(templates)
        texts = []
        for i in range(n):
            template = templates[i % len(templates)]
            text = template.format(steps=step_text, final=final_text)
            if i >= len(templates):
                text += f" (variation {i + 1})"
            texts.append(text)
        return texts

    def _backtranslate(self, prompt: str, n: int) -> list[str]:
        match = None
        for line in prompt.splitlines():
            if line.startswith("Description: "):
                match = line[len("Description: "):]
        if match is None:
            return ["SELECT 1"] * n
        sql = nl_to_sql(match)
        return [sql] * n


def _extract_fenced_sql(prompt: str) -> str:
    match = re.search(r"```sql\n(.*?)\n```", prompt, re.DOTALL)
    return match.group(1).strip() if match else ""


def _extract_guidance(prompt: str) -> list[str]:
    return [
        line[len("Annotator guidance: "):]
        for line in prompt.splitlines()
        if line.startswith("Annotator guidance: ")
    ]


def _extract_steps(prompt: str) -> list[tuple[str, str]]:
    steps = []
    in_steps = False
    for line in prompt.splitlines():
        if line == "Steps:":
            in_steps = True
            continue
        if in_steps:
            match = re.match(r"- ([^:]+): (.*)$", line)
            if not match:
                break
            steps.append((match.group(1), match.group(2)))
    return steps


def _declause(nl: str) -> str:
    """Lowercase the leading verb and drop the trailing period for splicing."""
    text = nl.strip().rstrip(".")
    if text and text[0].isupper():
        text = text[0].lower() + text[1:]
    return text


class HttpChatBackend:
    """Chat-completions-compatible client.

    POST <base_url>/v1/chat/completions with the prompt as a single user
    message; 3 attempts with 1s/2s/4s backoff before raising BackendError.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        session=None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        import requests

        self.base_url = (base_url or os.environ.get(ENV_LLM_URL, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(ENV_LLM_KEY, "")
        self.model_id = model or os.environ.get(ENV_LLM_MODEL, "gpt-4o")
        self._session = session or requests.Session()
        self._sleep = sleep

    def complete(self, prompt: str, params: GenerationParams) -> list[str]:
        if not self.base_url:
            raise BackendError(f"no backend URL configured ({ENV_LLM_URL})")
        payload = {
            "model": params.model_name or self.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "n": params.n_candidates,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        url = f"{self.base_url}/v1/chat/completions"
        last_error: Exception | None = None
        for attempt in range(3):
            if attempt:
                self._sleep(2 ** (attempt - 1))
            try:
                resp = self._session.post(url, json=payload, headers=headers, timeout=60)
                resp.raise_for_status()
                doc = resp.json()
                return [c["message"]["content"] for c in doc["choices"]]
            except Exception as exc:
                last_error = exc
        raise BackendError(f"completion failed after 3 attempts: {last_error}", attempts=3)

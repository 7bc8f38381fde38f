"""LLM client contract and the shipped implementations.

Contract: complete(prompt, model_id, temperature) -> str. Callers treat any
raised exception as a transport failure.
"""

from __future__ import annotations

import os


class OpenAIChatClient:
    """Live chat-completions client; one API key serves LLM and embeddings."""

    def __init__(self, api_key=None, base_url="https://api.openai.com/v1"):
        self.api_key = api_key or os.environ.get("GREYLIT_API_KEY")
        self.base_url = base_url.rstrip("/")

    def complete(self, prompt, model_id, temperature):
        import requests

        if not self.api_key:
            raise RuntimeError("no API key configured (GREYLIT_API_KEY)")
        resp = requests.post(
            f"{self.base_url}/chat/completions",
            headers={"Authorization": f"Bearer {self.api_key}"},
            json={
                "model": model_id,
                "temperature": temperature,
                "messages": [{"role": "user", "content": prompt}],
            },
            timeout=120,
        )
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]


class FailingLLM:
    """Always fails; used offline so the template fallback plans queries."""

    def complete(self, prompt, model_id, temperature):
        raise RuntimeError("no LLM available")


class ScriptedLLM:
    """Returns canned responses in order; records the prompts it saw."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.prompts = []
        self.calls = []

    def complete(self, prompt, model_id, temperature):
        self.prompts.append(prompt)
        self.calls.append({"prompt": prompt, "model_id": model_id,
                           "temperature": temperature})
        if not self.responses:
            raise RuntimeError("scripted LLM exhausted")
        return self.responses.pop(0)

"""The bundled fixture set, shipped as versioned JSON data."""
from __future__ import annotations

import json
from importlib import resources


def load_bundle(path: str | None = None) -> dict:
    if path is None:
        text = resources.files(__name__).joinpath("bundle.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)

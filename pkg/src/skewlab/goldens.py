"""Reference values measured by this package itself.

Quantities like the extracted phase shift or the front speed have no
external table to compare against at our grid resolutions, so the first
verified build records what it measured, and every later build is held to
that recording.  Each file carries a note saying where the number came
from.  Deleting a file re-arms recording for the next run.
"""

from __future__ import annotations

import json
from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "goldens"


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.json"


def ensure_golden(name: str, value, note: str = ""):
    """Return the recorded reference for `name`, recording `value` if absent.

    `value` may be a float or a flat dict of floats.  The caller asserts
    closeness against the return; on the recording run the two coincide.
    """
    path = golden_path(name)
    if path.exists():
        return json.loads(path.read_text())["value"]
    GOLDEN_DIR.mkdir(exist_ok=True)
    if isinstance(value, dict):
        payload = {str(k): float(v) for k, v in value.items()}
    else:
        payload = float(value)
    path.write_text(json.dumps(
        {"name": name, "value": payload, "note": note},
        indent=2, sort_keys=True,
    ) + "\n")
    return payload

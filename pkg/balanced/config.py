"""Enumeration caps shared by the oracle, the orientation sweep and sampling."""

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

ENV_PREFIX = "BALANCED_"


class Caps(BaseModel):
    """Desk-scale limits; every capped operation refuses work beyond them."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_cycle_edges: int = Field(default=12, ge=0, le=64)
    max_enumeration: int = Field(default=10_000_000, ge=1)
    max_orientation_edges: int = Field(default=20, ge=0, le=30)
    sample_bound: int = Field(default=100, ge=0)

    def merged(self, **overrides: int | None) -> "Caps":
        """Return a copy with every non-None override applied."""
        updates = {key: value for key, value in overrides.items() if value is not None}
        if not updates:
            return self
        return Caps(**{**self.model_dump(), **updates})


DEFAULT_CAPS = Caps()


def load_caps(env_file: str | Path | None = None) -> Caps:
    """Read cap overrides from the environment (and an optional dotenv file)."""
    load_dotenv(dotenv_path=env_file, override=False)
    values: dict[str, str] = {}
    for name in Caps.model_fields:
        raw = os.environ.get(f"{ENV_PREFIX}{name.upper()}")
        if raw is not None and raw.strip():
            values[name] = raw.strip()
    return Caps(**values)


def resolve_caps(caps: Caps | None) -> Caps:
    return DEFAULT_CAPS if caps is None else caps

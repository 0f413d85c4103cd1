"""Base class for configurable teamrules tools.

A tool is a pydantic model: its fields are the knobs read from the
experiment config, its methods do the work on datasets and profiles.
"""

from teamrules.onto import BasePydanticModel
from teamrules.util import render_text_hash


class Tool(BasePydanticModel):
    """Base class for binarizers, miners and discretion trainers."""

    def __init__(self, **kwargs):
        super().__init__(**kwargs)

    def fingerprint(self) -> str:
        """Short hash of the tool's settings, stable across runs."""
        return render_text_hash(f"{type(self).__name__}:{self.model_dump_json()}")

    def __str__(self) -> str:
        settings = ", ".join(f"{k}={v}" for k, v in self.model_dump().items())
        return f"{type(self).__name__}({settings}) [{self.fingerprint()}]"

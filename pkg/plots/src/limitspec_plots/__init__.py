"""Static figure renderer for limitspec CLI output bundles.

Consumes the documented CSV/JSON schemas only; never recomputes numerics.
"""

__version__ = "0.1.0"


class SchemaError(ValueError):
    """An input file does not match the documented schema."""

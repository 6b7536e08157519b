"""Exception types shared across the package."""


class PolyExtractError(Exception):
    """Base class for all package-specific errors."""


class ZeroAreaError(PolyExtractError):
    """Polygon is degenerate: |signed area| below tolerance or < 3 vertices."""


class TooManyCornersError(PolyExtractError):
    """A ring has more vertices than the requested sample count."""


class SizeMismatchError(PolyExtractError):
    """More corners than sample slots in a snap operation."""


class LengthMismatchError(PolyExtractError):
    """Sequences that must have equal length do not."""


class DimensionMismatchError(PolyExtractError):
    """Masks of different dimensions cannot be combined."""


class NonFiniteError(PolyExtractError):
    """A cost matrix or input contains NaN or infinity."""


class ShapeMismatchError(PolyExtractError):
    """Inconsistent channel / head / level shapes in the attention kernel."""


class ParseError(PolyExtractError):
    """A document could not be parsed; the message carries field context."""

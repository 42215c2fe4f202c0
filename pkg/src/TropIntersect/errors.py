from __future__ import annotations


class TropicalError(ValueError):
    """Base class for invalid input or failed geometric preconditions."""


class ParseError(TropicalError):
    def __init__(self, message: str, position: int | None = None) -> None:
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class EmptyPolyhedron(TropicalError):
    pass


class SpanMismatch(TropicalError):
    pass


class NotAFace(TropicalError):
    pass


class SupportNotContained(TropicalError):
    pass


class AmbientMismatch(TropicalError):
    pass


class NotDependent(TropicalError):
    pass


class NotATreeMetric(TropicalError):
    def __init__(self, message: str, witness: tuple[int, int, int, int] | None = None) -> None:
        super().__init__(message)
        self.witness = witness


class DegreeTooLarge(TropicalError):
    pass


class InvalidCurve(TropicalError):
    pass


class InvalidMatroid(TropicalError):
    pass

"""Exception types raised across the toolkit.

Everything derives from PHKitError so the CLI can map domain failures to a
single exit code. Parsing problems carry the 1-based line number of the
offending input line.
"""

from __future__ import annotations


class PHKitError(Exception):
    pass


class MonotonicityViolation(PHKitError):
    """A cell was assigned a smaller filtration value than one of its faces."""

    def __init__(self, cell, face, cell_value, face_value):
        self.cell = cell
        self.face = face
        self.cell_value = cell_value
        self.face_value = face_value
        super().__init__(
            f"cell {cell} has value {cell_value!r} below its face "
            f"{face} at {face_value!r}"
        )


class MissingFace(PHKitError):
    """A filtration or complex references a cell whose face is absent."""

    def __init__(self, cell, face):
        self.cell = cell
        self.face = face
        super().__init__(f"cell {cell} is missing its face {face}")


class DegenerateInput(PHKitError):
    pass


class DuplicatePoints(PHKitError):
    def __init__(self, i, j):
        self.i = i
        self.j = j
        super().__init__(f"points {i} and {j} coincide within tolerance")


class UniformBitmap(PHKitError):
    pass


class TooLarge(PHKitError):
    pass


class EssentialPair(PHKitError):
    pass


class NotDegreeOne(PHKitError):
    pass


class BadRange(PHKitError):
    pass


class BadParams(PHKitError):
    pass


class BadDegree(PHKitError):
    pass


class NoPairs(PHKitError):
    pass


class MissingProvenance(PHKitError):
    pass


class ParseError(PHKitError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")

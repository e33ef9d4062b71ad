"""Exception hierarchy.

``MathError`` covers rejections that are mathematically meaningful (an input
fails a precondition, a candidate is not an extension, ...).  The CLI maps
these to exit code 1.  Malformed files map to ``FormatError`` / exit code 2.
``InvariantViolation`` signals an internal bug: a linear system that theory
guarantees solvable turned out not to be.
"""


class MathError(Exception):
    """Base class for mathematically meaningful rejections."""

    kind = "math-error"

    def payload(self) -> dict:
        return {"kind": self.kind, "reason": str(self)}


class InputMismatch(MathError):
    """Dimension/endpoint mismatch or an ill-defined map."""

    kind = "input-mismatch"


class DomainError(MathError):
    """Input outside an operation's domain (infinite group, size guard...)."""

    kind = "domain-error"


class NotAnExtension(MathError):
    """Candidate (i, j) fails the extension conditions."""

    kind = "not-an-extension"


class IncomparableClasses(MathError):
    """Ext classes over different ambient presentations were compared."""

    kind = "incomparable-classes"


class FormatError(Exception):
    """Malformed JSON input."""


class InvariantViolation(RuntimeError):
    """A theoretically guaranteed property failed; indicates an internal bug."""

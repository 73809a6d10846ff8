"""Error hierarchy shared by every module.

Domain errors are split into four classes that the HTTP layer maps onto
status codes: validation/precondition failures (422), role failures (403),
unknown references (404) and version conflicts (409). Everything else is a
plain IsmsError.
"""

from __future__ import annotations


class IsmsError(Exception):
    """Base class for every domain error raised by the engine."""


class ValidationError(IsmsError):
    """Input violates a type invariant or an operation precondition."""


class OutOfRange(ValidationError):
    """An ordinal field is outside its declared range."""


class Forbidden(IsmsError):
    """The acting role is not permitted to perform this operation."""

    def __init__(self, role, required) -> None:
        self.role = role
        self.required = required
        super().__init__(f"role {role} not permitted; requires {required}")


class UnknownRef(IsmsError):
    """A referenced entity id does not exist."""

    def __init__(self, kind: str, ref: str) -> None:
        self.kind = kind
        self.ref = ref
        super().__init__(f"unknown {kind}: {ref}")


class UnknownAssetRef(UnknownRef):
    def __init__(self, ref: str) -> None:
        super().__init__("asset", ref)


class ConflictRetry(IsmsError):
    """Optimistic concurrency check failed; re-read and retry."""

    def __init__(self, expected: int, actual: int) -> None:
        self.expected = expected
        self.actual = actual
        super().__init__(f"stale version {expected}, store is at {actual}")


# risk-register

class InvalidTeam(ValidationError):
    def __init__(self, missing) -> None:
        self.missing = tuple(missing)
        names = ", ".join(r.value for r in self.missing)
        super().__init__(f"assessment team is missing roles: {names}")


class InvalidScope(ValidationError):
    pass


class GateNotMet(ValidationError):
    """A step gate blocks the requested cycle transition."""

    def __init__(self, step: int, reason: str) -> None:
        self.step = step
        self.reason = reason
        super().__init__(f"gate for step {step} not met: {reason}")


class CycleClosed(ValidationError):
    pass


class CycleStepTooEarly(ValidationError):
    pass


class AcceptNotAllowed(ValidationError):
    def __init__(self, band) -> None:
        self.band = band
        super().__init__(f"Accept not allowed for {band.value} risk")


class PlanExists(ValidationError):
    pass


class TreatmentIncomplete(ValidationError):
    pass


# corrective-action

class EmptyDescription(ValidationError):
    pass


class StepSkipped(ValidationError):
    def __init__(self, current: int, requested: int) -> None:
        self.current = current
        self.requested = requested
        super().__init__(
            f"cannot move to step {requested} from step {current}; steps advance one at a time"
        )


class RiskReviewMissing(ValidationError):
    pass


class AlreadyClosed(ValidationError):
    pass


class InvalidExtension(ValidationError):
    pass


# backup-governance

class InvalidMatrixRow(ValidationError):
    def __init__(self, category, frequency) -> None:
        self.category = category
        self.frequency = frequency
        super().__init__(
            f"({category.value}, {frequency.value}) is not a valid retention matrix row"
        )


class IncompleteRestore(ValidationError):
    pass


class EmptyTeam(ValidationError):
    pass


class AlreadyDisposed(ValidationError):
    pass


class MissingConfirmation(ValidationError):
    pass


class InvalidTransition(ValidationError):
    pass


# persistence

class CorruptStore(IsmsError):
    """The write-ahead log is damaged at the given byte offset."""

    def __init__(self, offset: int, detail: str) -> None:
        self.offset = offset
        self.detail = detail
        super().__init__(f"corrupt store record at offset {offset}: {detail}")


class FileUnreadable(IsmsError):
    pass


class FormatError(IsmsError):
    """A row of an imported file is malformed; carries the 1-based line number."""

    def __init__(self, line: int, detail: str) -> None:
        self.line = line
        self.detail = detail
        super().__init__(f"line {line}: {detail}")

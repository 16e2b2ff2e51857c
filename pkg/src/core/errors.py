"""Exception hierarchy for the matroid toolkit."""

from typing import Any, Optional


class MatroidError(Exception):
    """Base class for every error raised by the toolkit."""


class UnknownVersion(MatroidError):
    def __init__(self, version: Any):
        super().__init__(f"unknown version {version!r}")
        self.version = version


class VersionReleased(MatroidError):
    def __init__(self, version: Any):
        super().__init__(f"version {version!r} was released")
        self.version = version


class ElementAlreadyPresent(MatroidError):
    def __init__(self, element: Any, where: str = "set"):
        super().__init__(f"element {element!r} already present in {where}")
        self.element = element


ElementPresent = ElementAlreadyPresent


class ElementAbsent(MatroidError):
    def __init__(self, element: Any, where: str = "set"):
        super().__init__(f"element {element!r} not present in {where}")
        self.element = element


class ElementOutOfGroundSet(MatroidError):
    def __init__(self, element: Any, ground_size: Optional[int] = None):
        msg = f"element {element!r} outside the ground set"
        if ground_size is not None:
            msg += f" of size {ground_size}"
        super().__init__(msg)
        self.element = element


class MalformedInstance(MatroidError):
    """Instance parameters do not describe a valid matroid."""


class DuplicateWeights(MalformedInstance):
    """Two elements share a weight, so the min-weight basis is not unique."""


class DegreePreconditionViolated(MatroidError):
    """Source vertex has incoming arcs or sink vertex has outgoing arcs."""


class VariantSetMismatch(MatroidError):
    """Tree elements lie on the wrong side of the maintained set."""


class WrongSideElement(MatroidError):
    def __init__(self, element: Any, expected: str):
        super().__init__(f"element {element!r} must be {expected}")
        self.element = element


class ElementNotInX(ElementAbsent):
    def __init__(self, element: Any):
        super().__init__(element, "tree")


class ElementAlreadyInX(ElementAlreadyPresent):
    def __init__(self, element: Any):
        super().__init__(element, "tree")


class ResultingSetDependent(MatroidError):
    """An update would make the maintained set dependent."""


class NotCommonIndependent(MatroidError):
    """Set is not independent in both matroids."""


class GroundSetMismatch(MatroidError):
    """Matroids do not share the same ground set."""


class GuaranteeViolated(MatroidError):
    """Caller broke a documented precondition that is only checked in debug mode."""


class ZeroRankMatroid(MatroidError):
    """Packing number is unbounded when the rank is zero."""


class LoopElement(MatroidError):
    def __init__(self, element: Any):
        super().__init__(f"element {element!r} is a loop and cannot be covered")
        self.element = element


class GroundSetTooLarge(MatroidError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"ground set of size {size} exceeds the enumeration limit {limit}")
        self.size = size
        self.limit = limit


class InstanceFormatError(MatroidError):
    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class VerificationFailed(MatroidError):
    """A reported solution did not survive independent re-checking."""


class InvalidArgument(MatroidError):
    """Bad numeric argument such as k < 1 or k > n."""

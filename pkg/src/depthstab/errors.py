"""Exception hierarchy shared by the library and the CLI."""


class DepthStabError(Exception):
    """Base class for every error raised by depthstab."""


class GraphParseError(DepthStabError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(DepthStabError, ValueError):
    """Input violates a structural invariant (loop, duplicate edge, bad label)."""


class PreconditionError(DepthStabError, ValueError):
    """An operation was called outside its stated domain."""


class ResourceLimitError(DepthStabError):
    """A configurable cap (generators, lattice, box size) was exceeded."""

    def __init__(self, what: str, cap: int, needed: int | None = None):
        msg = f"{what} exceeds cap {cap}"
        if needed is not None:
            msg += f" (needed {needed})"
        super().__init__(msg)
        self.what = what
        self.cap = cap
        self.needed = needed

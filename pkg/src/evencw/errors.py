"""Exception hierarchy shared by all modules."""


class InputError(ValueError):
    """Malformed or inadmissible input (bad parameters, non-walks, ...)."""


class GenerationError(InputError):
    """A generator's identifications produced loops or multi-edges."""


class ResourceError(RuntimeError):
    """A search or enumeration ran past its configured budget.

    ``progress`` carries whatever partial information the caller can still
    use (counts reached, best bounds so far).
    """

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = progress if progress is not None else {}


class InternalConsistencyError(RuntimeError):
    """An invariant that the code guarantees was found broken."""

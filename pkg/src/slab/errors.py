"""Exception hierarchy shared by the library and the CLI."""


class SlabError(Exception):
    """Base class for all errors raised by slab."""


class InputError(SlabError, ValueError):
    """Invalid argument: bad vertex id, non power-of-two r, unknown strategy, ..."""


class ContractError(SlabError):
    """A precondition on the input graph does not hold (e.g. a cycle in a DAG-only routine)."""


class ResourceGuardError(SlabError):
    """A configured size guard was exceeded."""


class ValidationError(InputError):
    """An edge claimed to be in the transitive closure is not."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class FormatError(SlabError, ValueError):
    """Malformed SLAB file or recipe."""

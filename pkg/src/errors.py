class HnpError(Exception):
    """Base class of every domain error; ``exit_code`` is what the CLI returns."""
    exit_code = 2


class InvalidInputError(HnpError, ValueError):
    pass


class PreconditionError(HnpError):
    pass


class UndefinedRatioError(HnpError):
    """A ratio was requested over an empty population."""


class StorageError(HnpError):
    """The field archive could not be read or written."""


class ResourceLimitError(HnpError):
    exit_code = 3


class EnumerationBudgetExceeded(ResourceLimitError):
    """
    The enumerator ran out of search nodes.

    ``prefix`` holds the records that are provably complete: every extension with
    discriminant (or radical) strictly below ``frontier`` is in it, sorted like the
    full stream.
    """

    def __init__(self, prefix, frontier: int, nodes: int):
        super().__init__(f'enumeration budget of {nodes} nodes exhausted; '
                         f'stream complete below {frontier}')
        self.prefix = prefix
        self.frontier = frontier
        self.nodes = nodes

"""Exception hierarchy shared across walkwise."""


class WalkwiseError(Exception):
    """Base class for all walkwise errors."""


class GraphError(WalkwiseError, ValueError):
    """Invalid graph data or an operation that does not fit the graph."""


class EdgeListParseError(WalkwiseError, ValueError):
    """Malformed edge-list input. Carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class VertexSpecError(WalkwiseError, ValueError):
    """Malformed vertex-set specification such as ``0,2,5-7``."""

    def __init__(self, token: str, message: str):
        self.token = token
        super().__init__(f"{message}: {token!r}")


class BudgetExceededError(WalkwiseError):
    """A computation was refused because it would exceed its evaluation budget."""


class WitnessError(WalkwiseError):
    """The lower-bound witness could not be constructed."""

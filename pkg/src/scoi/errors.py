"""Exception hierarchy shared across the toolkit.

Pure-math domain violations (empty polynomial, zero vector under cosine)
raise plain ValueError; these classes cover data and pipeline failures
that the CLI maps to exit codes.
"""


class ScoiError(Exception):
    """Base class for toolkit errors."""


class ConfigError(ScoiError):
    """Bad configuration, unusable flags, or missing input paths (exit 1)."""


class DataError(ScoiError):
    """Malformed or inconsistent input data (exit 2)."""


class MalformedTreeError(DataError):
    """A dependency tree violates structural invariants (root count, cycles)."""


class UnknownLabelError(DataError):
    """A tree references a label index absent from the vocabulary."""


class AlignmentError(DataError):
    """Parallel text and parse files disagree on record counts."""


class TermExplosionError(ScoiError):
    """Exact polynomial expansion exceeded its term budget.

    Carries the node at which the budget was crossed so benchmark reports
    can say where an instance blew up.
    """

    def __init__(self, node: int, budget: int):
        self.node = node
        self.budget = budget
        super().__init__(
            f"term budget of {budget} exceeded while expanding node {node}"
        )

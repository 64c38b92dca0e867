"""Exception types shared across the package.

Plain ``ValueError`` is used for malformed input (bad letters, rank
mismatches, words outside a required subgroup); the classes here exist for
conditions callers are expected to catch and branch on.
"""


class CapExceeded(RuntimeError):
    """A configured resource cap was hit before the computation finished.

    ``reached`` is the size at the moment the cap fired and ``cap`` the
    configured limit, so callers can report both.
    """

    def __init__(self, what, reached, cap):
        self.what = what
        self.reached = reached
        self.cap = cap
        super().__init__(f"{what}: reached {reached} with cap {cap}")


class NotMaterializedError(RuntimeError):
    """A verbal level was queried for coset data it never materialized."""


class BelowBoundError(ValueError):
    """An exponent was below the certified avoidance bound M."""

    def __init__(self, q, bound):
        self.q = q
        self.bound = bound
        super().__init__(f"exponent {q} is below the avoidance bound M={bound}")

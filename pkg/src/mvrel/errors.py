class NumericalInconsistency(AssertionError):
    """Two routes to the same mathematical object disagreed beyond tolerance.

    This never happens for well-posed input; it points at a rank decision made
    too close to the cut-off.
    """


class HypothesisError(ValueError):
    """An input violates a precondition under which a formula is claimed."""

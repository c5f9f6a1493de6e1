"""
Exception hierarchy for gricci
Check operations report violations in a CheckReport; exceptions signal
misuse or unsatisfied preconditions.
"""

from typing import List, Optional


class GRicciError(Exception):
    """Base class for all library errors"""


class InputError(GRicciError):
    """Malformed or incompatible input data"""


class ParseError(InputError):
    """Syntax error in a polynomial or rational literal"""

    def __init__(self, message: str, line: int = 1, column: int = 1, text: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"{message} (line {line}, column {column})")


class DegreeOverflow(InputError):
    """A polynomial product exceeded the configured degree cap"""


class UnknownInstance(InputError):
    """Catalog lookup for a name that does not exist"""


class SingularGram(GRicciError):
    """Gram matrix of an eigenspace of the metric is not invertible"""


class NonMetricConnection(GRicciError):
    """Operation needs a connection with D(G) = 0"""


class MissingMetric(GRicciError):
    """Operation needs a generalized metric but none was supplied"""


class HypothesisViolated(GRicciError):
    """One or more hypotheses of a verified statement do not hold"""

    def __init__(self, failed: List[str], message: Optional[str] = None):
        self.failed = list(failed)
        super().__init__(message or "hypotheses violated: " + ", ".join(self.failed))


class RankOneSide(HypothesisViolated):
    """rk V+ = 1 or rk V- = 1"""

    def __init__(self, r_plus: int, r_minus: int):
        self.r_plus = r_plus
        self.r_minus = r_minus
        super().__init__(
            ["rank_not_one"],
            f"rk V+ = {r_plus}, rk V- = {r_minus}: a side of rank 1 is excluded",
        )


class ConstructionFailed(GRicciError):
    """A constructed object failed its validation"""


class NonTensorialDefect(GRicciError):
    """Divergence defect is not C-infinity linear"""


class NotHomogeneous(GRicciError):
    """Flow requested on an algebroid with a nontrivial base"""


class SymmetryLost(GRicciError):
    """Total Ricci tensor left the symmetric regime during a flow"""


class StepRejected(GRicciError):
    """Retraction onto the involutions failed"""

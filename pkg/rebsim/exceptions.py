"""
Exception hierarchy shared by the engine and the command line
"""


class RebsimError(Exception):
    """Base error; ``exit_code`` is what the CLI returns for it"""
    exit_code = 3


class CompositionError(RebsimError):
    """Two named objects cannot be combined (duplicate mode names)"""


class ModeNotFoundError(RebsimError, KeyError):
    """A mode name is not present in the state"""

    def __str__(self) -> str:
        return Exception.__str__(self)


class DimensionMismatchError(RebsimError):
    """Operator and state disagree on a mode dimension"""


class UndefinedFidelityError(RebsimError):
    """Fidelity requested for a state with zero trace"""


class ParameterError(RebsimError, ValueError):
    """A physical or channel parameter is out of range or inconsistent"""


class TruncationError(RebsimError):
    """Probability mass beyond the Fock truncation exceeds the threshold"""


class HeraldError(RebsimError):
    """The accepting herald patterns have zero total probability"""


class NoFeasiblePointError(RebsimError):
    """No sweep row satisfies the requested infidelity bound"""
    exit_code = 4


class ConfigError(RebsimError):
    """Run document failed validation"""
    exit_code = 2


class TruncationWarning(UserWarning):
    """Population in the top Fock level exceeds the leakage threshold"""

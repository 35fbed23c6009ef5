"""Exception hierarchy.

Everything raised for a numerical or mathematical reason derives from
:class:`DomainError`; the CLI maps those to exit status 1.
"""


class LameKitError(Exception):
    pass


class DomainError(LameKitError):
    pass


class StepSizeUnderflow(DomainError):
    pass


class SingularIntegrand(DomainError):
    pass


class PoleProximity(DomainError):
    pass


class ZeroSymmetry(DomainError):
    pass


class RecurrenceBreakdown(DomainError):
    pass


class UnsupportedN(DomainError):
    pass


class NotAnEigenvalue(DomainError):
    pass


class SpecError(LameKitError):
    """Invalid potential spec document. ``problems`` lists every violation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))

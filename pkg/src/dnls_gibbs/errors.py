"""Exception types raised across the package."""


class DnlsError(Exception):
    """Base class for all errors raised by :mod:`dnls_gibbs`."""


class NotExact(DnlsError):
    """A differential polynomial is not a total derivative."""


class NotVariational(DnlsError):
    """A vector of differential polynomials is not a variational derivative."""


class MalformedRung(DnlsError):
    """A hierarchy rung lacks the expected leading Sobolev term."""


class StepSizeInvalid(DnlsError, ValueError):
    pass


class NonFinite(DnlsError, FloatingPointError):
    """The time integrator produced NaN or Inf coefficients."""


class InvalidRadius(DnlsError, ValueError):
    pass


class NonRealFunctional(DnlsError):
    """A functional that is real in exact arithmetic evaluated to a complex number."""


class MismatchedMethods(DnlsError):
    """Two independent evaluation routes disagree beyond tolerance."""


class RegularityOutOfRange(DnlsError, ValueError):
    pass


class LambdaBelowNet(DnlsError, ValueError):
    """The threshold grid starts below the epsilon-net validity bound."""


class ConfigInvalid(DnlsError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = {"config": problems}
        self.problems = dict(problems)
        detail = "; ".join(f"{k}: {v}" for k, v in sorted(self.problems.items()))
        super().__init__(f"invalid configuration ({detail})")


class IoFailure(DnlsError, OSError):
    pass

"""Exception hierarchy.

Three families map onto CLI exit codes: configuration problems, violated
assumptions on the initial data, and numerical failures during a run.
"""


class ChaplyginError(Exception):
    """Base class; ``details`` is a JSON-friendly dict for reports."""

    exit_code = 4

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(ChaplyginError):
    exit_code = 2


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("invalid config: " + "; ".join(self.failures),
                         failures=self.failures)


class AssumptionError(ChaplyginError):
    exit_code = 3


class NoCuspFound(AssumptionError):
    pass


class AmbiguousCusp(AssumptionError):
    pass


class AssumptionsFailed(AssumptionError):
    def __init__(self, report):
        self.report = report
        failed = [k for k in ("h1", "h2", "h3", "h4", "h5")
                  if not getattr(report, k + "_ok")]
        super().__init__("assumptions failed: " + ", ".join(failed),
                         failed=failed)


class NumericalError(ChaplyginError):
    exit_code = 4


class DomainError(NumericalError):
    pass


class DegeneratePairError(NumericalError):
    """lam_plus - lam_minus collapsed: density concentration."""


class UnsolvableBeta(NumericalError):
    pass


class DegenerateClassification(NumericalError):
    pass


class NoRootError(NumericalError):
    pass


class RootStallError(NumericalError):
    pass


class BlowupReached(NumericalError):
    pass


class SideSelectionAmbiguous(NumericalError):
    pass


class ZeroWeightError(NumericalError):
    pass


class SupportViolation(NumericalError):
    pass


class BoundaryMismatch(NumericalError):
    pass


class PositivityLoss(NumericalError):
    pass


class TrajectoryHalted(NumericalError):
    """Raised by the shock integrator; carries the partial trajectory."""

    def __init__(self, message, trajectory=None, sample=None, **details):
        super().__init__(message, **details)
        self.trajectory = trajectory
        self.sample = sample


class EntropyViolated(TrajectoryHalted):
    pass


class EnvelopeExited(TrajectoryHalted):
    pass


class SideStateFailure(TrajectoryHalted):
    pass

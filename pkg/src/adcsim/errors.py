"""Exception types raised by adcsim."""


class AdcSimError(Exception):
    """Base class for all adcsim errors."""


class CutoffError(AdcSimError, ValueError):
    """The Fock cutoff is too small for the requested state or observable."""


class QuadratureError(AdcSimError, RuntimeError):
    """A numerical quadrature failed its convergence check."""


class PositivityError(AdcSimError, RuntimeError):
    """A density matrix lost positivity beyond tolerance."""


class ConvergenceError(AdcSimError, ValueError):
    """A Gaussian-integral convergence condition is violated."""

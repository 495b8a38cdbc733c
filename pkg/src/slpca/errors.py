"""Exception hierarchy shared by the library and the command line."""


class SlpcaError(Exception):
    """Base class for all errors raised by slpca."""


class InputError(SlpcaError, ValueError):
    """Malformed input or violated precondition (bad file, bad shape, bad parameter)."""


class NumericalError(SlpcaError, ArithmeticError):
    """A numerical step could not be carried out (singular matrix, rank deficiency)."""


class DegenerateModelError(NumericalError):
    """The fitted model has zero residual variance or a singular latent covariance."""

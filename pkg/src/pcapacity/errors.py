"""
Exception hierarchy shared by all p-capacity modules.

Each module raises its own subclass; the CLI maps them to exit codes.
"""


class PCapacityError(Exception):
    """Base class for every error raised by the package"""
    pass


class ProfileError(PCapacityError):
    """Exception raised for profile expression errors"""
    pass


class ProfileSyntaxError(ProfileError):
    """Exception raised when a profile expression cannot be parsed"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ProfileError):
    """Exception raised for identifiers that are neither t, a constant nor a function"""

    def __init__(self, name: str, position: int):
        super().__init__(f"Unknown identifier '{name}' at position {position}")
        self.name = name
        self.position = position


class ArityError(ProfileError):
    """Exception raised when a function is called with the wrong number of arguments"""
    pass


class ProfileDomainError(ProfileError):
    """Exception raised when an expression is evaluated outside its domain"""
    pass


class ProfileOverflowError(ProfileError):
    """Exception raised when an evaluation overflows the float range"""
    pass


class ManifoldError(PCapacityError):
    """Exception raised for invalid model manifolds or submersion data"""
    pass


class QuadratureError(PCapacityError):
    """Exception raised when adaptive quadrature fails to reach its tolerance.

    The partial result is attached but must not be used as a value.
    """

    def __init__(self, message: str, partial_value: float = float("nan"), error_estimate: float = float("nan")):
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate
        self.usable = False


class CapacityError(PCapacityError):
    """Exception raised for invalid capacity requests"""
    pass


class ConvergenceError(CapacityError):
    """Exception raised when the variational solver does not converge"""
    pass


class GridError(CapacityError):
    """Exception raised for degenerate discretization grids"""
    pass


class CriterionError(PCapacityError):
    """Exception raised for invalid parabolicity requests"""
    pass


class PreconditionError(PCapacityError):
    """Exception raised when an operation refuses to run on unmet hypotheses"""
    pass


class SpecFileError(PCapacityError):
    """Exception raised for unreadable or invalid manifold spec files"""
    pass

class CTSplineException(Exception):
    """
    Base class for every error raised by ``ct_spline``.
    """
    pass


class ValidationError(CTSplineException):
    """
    Input does not satisfy a documented contract
    (ranges, ordering, file format). Mapped to exit code 1 by the CLI.
    """
    pass


class NumericalError(CTSplineException):
    """
    A computation could not produce a trustworthy result.
    Mapped to exit code 2 by the CLI.
    """
    pass


class OutOfRangeError(ValidationError):
    """
    Timestamp lies outside the valid interpolation range of a spline.
    """
    def __init__(self, t: float, start: float, end: float, closed=False):
        bracket = "]" if closed else ")"
        super().__init__(
            f"timestamp {t!r} is outside the valid range "
            f"[{start!r}, {end!r}{bracket}"
        )
        self.t = t
        self.start = start
        self.end = end


class KnotError(ValidationError):
    """
    Knot timestamps are not strictly increasing or too few of them exist.
    """
    pass


class FileFormatError(ValidationError):
    """
    A trajectory, control-point or observation file failed to parse.
    """
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class BranchAmbiguityError(NumericalError):
    """
    Logarithm requested for a rotation whose angle is (numerically) pi,
    where the axis sign is ambiguous.
    """
    pass


class DegenerateCloudError(NumericalError):
    """
    Point cloud has fewer than three points or no spread along
    two independent directions.
    """
    pass


class SingularSystemError(NumericalError):
    """
    Normal equations cannot be factorized.
    """
    def __init__(self, message: str, condition_number: float):
        super().__init__(
            f"{message} (condition number {condition_number:.3e})"
        )
        self.condition_number = condition_number


class JacobianMismatchError(NumericalError):
    """
    Analytic and numeric Jacobians disagree beyond tolerance.
    """
    pass


__all__ = [
    "CTSplineException",
    "ValidationError",
    "NumericalError",
    "OutOfRangeError",
    "KnotError",
    "FileFormatError",
    "BranchAmbiguityError",
    "DegenerateCloudError",
    "SingularSystemError",
    "JacobianMismatchError",
]

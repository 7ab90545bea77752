class BpiLabError(Exception):
    """Base error for bad data or inputs; the CLI maps it to its exit code."""

    exit_code = 2


class ParseError(BpiLabError):
    pass


class ShapeError(BpiLabError):
    pass


class DataValidationError(BpiLabError):
    pass


class UsageError(BpiLabError):
    exit_code = 1

class TreeStackError(Exception):
    """Base class for errors raised by this package."""


class InputError(TreeStackError, ValueError):
    """Bad argument supplied by the caller."""


class ContractError(TreeStackError):
    """A documented precondition was violated."""


class MaterializationRefused(TreeStackError):
    """An explicit transition table would exceed the configured threshold."""


class ParseError(TreeStackError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}" if line else message)

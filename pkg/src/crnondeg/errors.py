"""Exception hierarchy.  Everything raised on bad input derives from CRError."""


class CRError(Exception):
    pass


class ParseError(CRError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class UnsupportedRadicalError(ParseError):
    pass


class SpaceMismatchError(CRError, ValueError):
    pass


class UnknownVariableError(CRError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConstantTermError(CRError, ValueError):
    pass


class SingularError(CRError, ArithmeticError):
    pass


class WorkingOrderExhausted(CRError):
    pass


class ConvergenceError(CRError):
    pass


class ManifoldError(CRError):
    pass


class GenericityError(ManifoldError):
    pass


class BasepointError(ManifoldError):
    pass


class TangencyError(CRError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


class JobError(CRError):
    pass

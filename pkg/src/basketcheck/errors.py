"""Exception hierarchy shared by the parser, engine and command line."""


class BasketCheckError(Exception):
    """Base class for every error raised by this package."""


class LocatedError(BasketCheckError):
    """An error tied to a position in some source text."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.col}: {self.message}"


class ParseError(LocatedError):
    """Lexical or syntactic error, or a duplicate declaration."""


class EvalError(LocatedError):
    """Unbound identifier, type mismatch or inexact integer result."""


class BuildError(LocatedError):
    """The model parsed but does not describe a well-formed DTMC."""


class PropertyFileError(BasketCheckError):
    """One or more lines of a property file failed to parse."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


class SolverError(BasketCheckError):
    """An iterative solver hit its iteration limit before converging."""

    def __init__(self, method, iterations, residual):
        self.method = method
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"{method} did not converge after {iterations} iterations "
            f"(last max-norm step {residual:.3e})"
        )

"""Exception hierarchy shared by the solvers, the simulator and the CLI."""


class ProjsolveError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ProjsolveError, ValueError):
    """Operand shapes are incompatible."""


class NonFiniteError(ProjsolveError, ValueError):
    """An input contains NaN or Inf."""


class SizeGuardError(ProjsolveError, ValueError):
    """A dense test-support object would exceed its size guard."""


class SolverError(ProjsolveError):
    """Numerical failure inside a solver. ``code`` is used as the bench status."""

    code = "solver-error"


class SingularPivot(SolverError):
    """A pivot column fell below the singularity floor.

    ``column`` is the index of the offending column in the *original* matrix.
    """

    code = "SingularPivot"

    def __init__(self, column, gram=None, floor=None):
        self.column = column
        self.gram = gram
        self.floor = floor
        msg = f"pivot column {column} is numerically zero"
        if gram is not None and floor is not None:
            msg += f" (squared norm {gram:.3e} < floor {floor:.3e})"
        super().__init__(msg)


class ZeroDenominator(SolverError):
    """The component sum of the reduced column cancels (sum-ratio mode)."""

    code = "ZeroDenominator"


class ZeroRow(SolverError):
    code = "ZeroRow"

    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} of the matrix is zero")


class SingularGram(SolverError):
    code = "SingularGram"


class UnknownMethod(ProjsolveError, KeyError):
    def __init__(self, name, known=()):
        self.name = name
        msg = f"unknown method {name!r}"
        if known:
            msg += f"; expected one of {', '.join(known)}"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class AuditFailure(ProjsolveError):
    """Observed operation count differs from the closed-form expectation."""

    def __init__(self, what, expected, observed):
        self.what = what
        self.expected = expected
        self.observed = observed
        super().__init__(f"{what}: expected {expected}, observed {observed}")


class ParseError(ProjsolveError, ValueError):
    """Malformed matrix/vector file. ``line`` is 1-based."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class MalformedHeader(ParseError):
    pass


class EntryCountMismatch(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass

"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented exit statuses without a lookup table.
"""


class SpinOptomechError(Exception):
    exit_code = 3
    # scalar attributes copied into the machine-readable error report
    _REPORTED = ("field", "value", "margin", "line", "column", "residual", "iterations")

    def to_dict(self):
        d = {"error": type(self).__name__, "message": str(self)}
        for name in self._REPORTED:
            v = getattr(self, name, None)
            if isinstance(v, (int, float, str)):
                d[name] = v
        return d


# -- parameter / physics errors (exit 3 unless noted) -----------------------

class NonPositiveRate(SpinOptomechError, ValueError):
    exit_code = 2

    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be positive (got {value!r})")


class NonFiniteInput(SpinOptomechError, ValueError):
    exit_code = 2

    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} is not finite (got {value!r})")


class NegativePower(SpinOptomechError, ValueError):
    exit_code = 2


class FixedPointDiverged(SpinOptomechError, RuntimeError):
    def __init__(self, last, residual, iterations):
        self.last = last
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"photon-number fixed point did not converge after {iterations} "
            f"iterations (last n_s={last!r}, residual={residual!r})"
        )


class NoRealRoot(SpinOptomechError, RuntimeError):
    pass


class EigenSolverFailure(SpinOptomechError, RuntimeError):
    def __init__(self, matrix, reason=""):
        self.matrix = matrix
        super().__init__(f"eigenvalue solver failed: {reason}")


class ScanRangeExhausted(SpinOptomechError, RuntimeError):
    pass


class UnstableOperatingPoint(SpinOptomechError, RuntimeError):
    def __init__(self, margin):
        self.margin = margin
        super().__init__(
            f"operating point is linearly unstable (max Re(lambda) = {margin:.6g}); "
            "pass allow_unstable=True to evaluate anyway"
        )


class SingularResolvent(SpinOptomechError, RuntimeError):
    pass


class GridTooNarrow(SpinOptomechError, ValueError):
    pass


class ZeroPump(SpinOptomechError, ValueError):
    pass


# -- configuration errors (exit 2) ------------------------------------------

class ConfigError(SpinOptomechError, ValueError):
    exit_code = 2


class ParseError(ConfigError):
    def __init__(self, message, line, column=1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class ConstraintViolation(ConfigError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

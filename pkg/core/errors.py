"""
Errors Module

Exception hierarchy shared by every qpk module. Each error carries the
process exit code the command line driver uses when it surfaces it.
"""


class QpkError(Exception):
    """Base class for all library errors."""

    exit_code = 10

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def details(self):
        """Structured attributes for reports."""
        return {}


class NotAFilter(QpkError):
    exit_code = 11

    def __init__(self, reason, witness=None):
        super().__init__(f"not a filter: {reason}" + (f" (witness {witness})" if witness is not None else ""))
        self.reason = reason
        self.witness = witness

    def details(self):
        return {"reason": self.reason, "witness": repr(self.witness)}


class TooLarge(QpkError):
    exit_code = 12

    def __init__(self, size, bound, what="carrier"):
        super().__init__(f"{what} of size {size} exceeds the configured bound {bound}")
        self.size = size
        self.bound = bound

    def details(self):
        return {"size": self.size, "bound": self.bound}


class NotLeftCauchy(QpkError):
    exit_code = 13

    def __init__(self, n, m):
        super().__init__(f"sequence is not effectively left-Cauchy at ({n}, {m})")
        self.n = n
        self.m = m

    def details(self):
        return {"n": self.n, "m": self.m}


class NotHandy(QpkError):
    exit_code = 14

    def __init__(self, element):
        super().__init__(f"element {element!r} has no strict predecessor within the search range")
        self.element = element

    def details(self):
        return {"element": repr(self.element)}


class SpaceMismatch(QpkError):
    exit_code = 15

    def __init__(self, expected, got):
        super().__init__(f"space mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got

    def details(self):
        return {"expected": self.expected, "got": self.got}


class InvalidPoint(QpkError):
    exit_code = 16

    def __init__(self, n, m):
        super().__init__(f"point violates its modulus at ({n}, {m})")
        self.n = n
        self.m = m

    def details(self):
        return {"n": self.n, "m": self.m}


class NoLimitOperator(QpkError):
    exit_code = 17

    def __init__(self, space):
        super().__init__(f"space {space} has no limit operator")
        self.space = space


class PointOutsideY(QpkError):
    exit_code = 18

    def __init__(self, index):
        super().__init__(f"point is refuted by constituent {index} of the subspace code")
        self.index = index

    def details(self):
        return {"index": self.index}


class OracleMissing(QpkError):
    exit_code = 19

    def __init__(self, index):
        super().__init__(f"no distance oracle for closed set {index}")
        self.index = index


class MissingConstituents(QpkError):
    exit_code = 20

    def __init__(self, what):
        super().__init__(f"code lacks explicit constituents: {what}")
        self.what = what


class InexactMetric(QpkError):
    exit_code = 21

    def __init__(self, space):
        super().__init__(f"space {space} does not provide exact rational distances")
        self.space = space


class KindMismatch(QpkError):
    exit_code = 22

    def __init__(self, expected, got):
        super().__init__(f"code kind mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class DisjointnessUnknown(QpkError):
    exit_code = 23

    def __init__(self):
        super().__init__("subspace code does not certify disjoint constituents")


class ParseError(QpkError):
    exit_code = 24

    def __init__(self, line, col, expected):
        super().__init__(f"parse error at line {line}, column {col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected

    def details(self):
        return {"line": self.line, "col": self.col, "expected": self.expected}


class UnknownName(QpkError):
    exit_code = 25

    def __init__(self, name, kind="block"):
        super().__init__(f"unknown {kind}: {name}")
        self.name = name

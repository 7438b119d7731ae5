"""
Three-valued verdicts (Kleene logic) used by every stage-wise evaluation.
"""

from enum import Enum


class Tri(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value):
        return cls.YES if value else cls.NO

    def __and__(self, other):
        if self is Tri.NO or other is Tri.NO:
            return Tri.NO
        if self is Tri.YES and other is Tri.YES:
            return Tri.YES
        return Tri.UNKNOWN

    def __or__(self, other):
        if self is Tri.YES or other is Tri.YES:
            return Tri.YES
        if self is Tri.NO and other is Tri.NO:
            return Tri.NO
        return Tri.UNKNOWN

    def __invert__(self):
        if self is Tri.YES:
            return Tri.NO
        if self is Tri.NO:
            return Tri.YES
        return Tri.UNKNOWN

    @property
    def decided(self):
        return self is not Tri.UNKNOWN

    def __str__(self):
        return self.value


# membership reads better as In/Out
IN = Tri.YES
OUT = Tri.NO
UNKNOWN = Tri.UNKNOWN


def all_of(verdicts):
    result = Tri.YES
    for v in verdicts:
        result = result & v
        if result is Tri.NO:
            return result
    return result


def any_of(verdicts):
    result = Tri.NO
    for v in verdicts:
        result = result | v
        if result is Tri.YES:
            return result
    return result

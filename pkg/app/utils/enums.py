from enum import Enum


class CoarsePos(str, Enum):
    NOUN = "N"
    VERB = "V"
    ADJECTIVE = "J"
    OTHER = "O"


CONTENT_POS = frozenset({CoarsePos.NOUN.value, CoarsePos.VERB.value, CoarsePos.ADJECTIVE.value})


class Scheme(str, Enum):
    RAW = "RAW"
    PPMI = "PPMI"
    LMI = "LMI"


class Measure(str, Enum):
    COSINE = "cosine"
    APSYN = "apsyn"


class WindowOver(str, Enum):
    FILTERED = "filtered"
    SURFACE = "surface"


class DatasetFormat(str, Enum):
    WS353 = "WS353"
    MEN = "MEN"
    SIMLEX = "SIMLEX"


class PosPolicy(str, Enum):
    NOUN_FIRST = "noun-first"
    MOST_FREQUENT = "most-frequent"


class OovPolicy(str, Enum):
    SKIP = "skip"
    ZERO = "zero"


class ModelKind(Enum):
    COUNT = 1
    WEIGHTED = 2
    DENSE = 3

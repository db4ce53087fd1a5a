from app.utils.logger import logger


class DSMError(Exception):
    """Base error. `exit_code` is what the CLI returns when it escapes a controller."""

    exit_code = 1


class ConfigurationError(DSMError, ValueError):
    pass


class CorpusReadError(DSMError, OSError):
    pass


class MalformedTokenError(DSMError, ValueError):
    """Recoverable: the stream skips the token and counts it."""

    def __init__(self, raw: str):
        super().__init__(f"Malformed token {raw!r}: expected lemma_TAG")
        self.raw = raw


class ModelFormatError(DSMError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class FingerprintMismatchError(DSMError):
    def __init__(self, stage: str, expected: str, found: str):
        super().__init__(
            f"Config fingerprint mismatch for stage '{stage}': "
            f"config gives {expected[:12]}, input model was built with {found[:12]}"
        )
        self.stage = stage


class DatasetParseError(DSMError, ValueError):
    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.line_no = line_no


class OOVError(DSMError, KeyError):
    exit_code = 2

    def __init__(self, word):
        super().__init__(f"Out-of-vocabulary word: {word}")
        self.word = word

    def __str__(self):
        return self.args[0]


class UndefinedSimilarityError(DSMError, ArithmeticError):
    exit_code = 2


class UndefinedCorrelationError(DSMError, ArithmeticError):
    pass


class EvaluationError(DSMError):
    exit_code = 2


def handle_cli_error(exc: BaseException) -> int:
    """Log a failure that reached the command layer and return its exit code."""
    if isinstance(exc, DSMError):
        logger.error(str(exc))
        return exc.exit_code
    logger.error(f"Unexpected error: {exc}", exc_info=True)
    return 1

import logging
import os

from dotenv import load_dotenv

load_dotenv()


def setup_logger():
    """
    Sets up the shared console logger. Level comes from LOG_LEVEL (default INFO).
    """
    logger = logging.getLogger("dsm")
    logger.setLevel(os.getenv("LOG_LEVEL", "INFO").upper())

    if not logger.handlers:
        console_handler = logging.StreamHandler()
        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s'
        )
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)
    return logger


def progress_enabled() -> bool:
    return os.getenv("DSM_PROGRESS", "1") != "0"


logger = setup_logger()

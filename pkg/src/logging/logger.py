import logging
import os
from datetime import datetime
from colorlog import ColoredFormatter

LOG_FORMAT = "[ %(asctime)s ] %(lineno)d %(name)s - %(levelname)s - %(message)s"

# Console handler (standard error, so reports on stdout stay clean)
console_handler = logging.StreamHandler()
color_formatter = ColoredFormatter(
    "%(log_color)s[%(asctime)s] %(lineno)d %(name)s - %(levelname)s - %(message)s",
    log_colors={
        'DEBUG':    'cyan',
        'INFO':     'green',
        'WARNING':  'yellow',
        'ERROR':    'red',
        'CRITICAL': 'bold_red',
    }
)
console_handler.setFormatter(color_formatter)

# Get logger
logger = logging.getLogger("varselect_logger")
logger.setLevel(logging.INFO)
logger.addHandler(console_handler)
logger.propagate = False


def configure_file_logging(log_dir: str = "logs", level: str = "INFO") -> str:
    """
    Attach a timestamped file handler to the project logger.

    Only the CLI calls this; importing the library never creates files.

    Args:
        log_dir (str): Directory for log files, created if missing.
        level (str): Logging level name applied to the logger.

    Returns:
        str: Path of the log file.
    """
    os.makedirs(log_dir, exist_ok=True)
    log_file = f"{datetime.now().strftime('%m_%d_%Y_%H_%M_%S')}.log"
    log_file_path = os.path.join(log_dir, log_file)

    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler):
            logger.removeHandler(handler)
            handler.close()

    file_handler = logging.FileHandler(log_file_path)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(file_handler)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    return log_file_path

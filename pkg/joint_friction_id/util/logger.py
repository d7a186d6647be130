import functools
import logging
import os
import sys

from termcolor import colored

FMT = "[%(asctime)s %(name)s] (%(filename)s %(lineno)d): %(levelname)s %(message)s"
DATE_FMT = "%Y-%m-%d %H:%M:%S"


@functools.lru_cache()
def create_logger(output_dir, name="", level=logging.INFO):
    """Attaches a colored console handler and a ``run.log`` file handler.

    Handlers go on the named logger; with the default empty name this is the
    root logger, so module-level ``logging.info`` calls land in the run log.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    color_fmt = (
        colored("[%(asctime)s %(name)s]", "green")
        + colored("(%(filename)s %(lineno)d)", "yellow")
        + ": %(levelname)s %(message)s"
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(
        logging.Formatter(fmt=color_fmt, datefmt=DATE_FMT),
    )
    logger.addHandler(console_handler)

    os.makedirs(output_dir, exist_ok=True)
    file_handler = logging.FileHandler(
        os.path.join(output_dir, "run.log"),
        mode="a",
        encoding="utf-8",
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(fmt=FMT, datefmt=DATE_FMT))
    logger.addHandler(file_handler)

    return logger

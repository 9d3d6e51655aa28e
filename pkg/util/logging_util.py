from pathlib import Path
from typing import Optional
import logging


LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def setup_logging(verbosity: int = 1, out_dir: Optional[str] = None) -> logging.Logger:
    """
    Configure the root logger: console always, run.log when an output directory is known
    """
    root = logging.getLogger()
    root.setLevel(VERBOSITY_LEVELS.get(verbosity, logging.DEBUG))
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console)

    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(Path(out_dir) / 'run.log')
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)
    return root

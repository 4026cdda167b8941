from logging import (
    DEBUG,
    INFO,
    WARNING,
    Formatter,
    NullHandler,
    StreamHandler,
    getLogger,
)

log = getLogger(__name__)
log.addHandler(NullHandler())

LEVELS = {0: WARNING, 1: INFO, 2: DEBUG}


def configure(verbosity: int = 0) -> None:
    """Attach a stderr handler to the package logger."""
    root = getLogger("ppcount")
    level = LEVELS.get(verbosity, DEBUG)
    root.setLevel(level)
    if not any(isinstance(h, StreamHandler) for h in root.handlers):
        handler = StreamHandler()
        fmt = "%(asctime)s %(name)s %(levelname)s %(message)s"
        handler.setFormatter(Formatter(fmt))
        root.addHandler(handler)
    log.debug(f"logging configured at level {level}")

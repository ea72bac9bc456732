"""Allow ``python -m gaitstage``."""

from .cli.main import run

run()

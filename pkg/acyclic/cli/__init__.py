# acyclic/cli/__init__.py
from acyclic.cli.commands import main, run

__all__ = ["main", "run"]

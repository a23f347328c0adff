# acyclic/config.py
import os
from dataclasses import dataclass

# Only load .env during normal runtime, not during pytest (so tests can fully control env)
if os.getenv("PYTEST_CURRENT_TEST") is None:
    from dotenv import load_dotenv
    load_dotenv()

SOLVERS = ("jacobi", "numpy", "scipy")


@dataclass(frozen=True)
class Settings:
    threads: int = 1
    eigensolver: str = "jacobi"
    log_level: str = "WARNING"


def _threads_from_env() -> int:
    raw = os.getenv("THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"THREADS must be a positive integer, got {raw!r}")
    if threads < 1:
        raise ValueError(f"THREADS must be a positive integer, got {raw!r}")
    return threads


def get_settings() -> Settings:
    """
    Read settings from the environment (a .env file is honoured):
      THREADS              worker threads for per-eigenvalue work (default 1)
      EIGENSOLVER_PROVIDER "jacobi" (default) | "numpy" | "scipy"
      ACYCLIC_LOG_LEVEL    logging level name (default WARNING)
    """
    solver = os.getenv("EIGENSOLVER_PROVIDER", "jacobi").lower()
    if solver not in SOLVERS:
        raise ValueError(f"Unsupported EIGENSOLVER_PROVIDER: {solver}")
    return Settings(
        threads=_threads_from_env(),
        eigensolver=solver,
        log_level=os.getenv("ACYCLIC_LOG_LEVEL", "WARNING").upper(),
    )

from .config import AppConfig
from .engine import Engine, run_embed, run_index, run_ingest

__all__ = ["AppConfig", "Engine", "run_ingest", "run_index", "run_embed"]

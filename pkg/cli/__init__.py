from cli.commands import main, run
from cli.config import RunConfig, build_config

__all__ = ["main", "run", "RunConfig", "build_config"]

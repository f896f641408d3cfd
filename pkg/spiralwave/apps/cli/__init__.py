from .commands import cli, run
from .config import ParameterRange, PolynomialTables, RunConfig, build_config
from .outputs import Artifact, write_outputs

__all__ = ["Artifact", "ParameterRange", "PolynomialTables", "RunConfig", "build_config", "cli", "run", "write_outputs"]

"""
Run Pipelines

Configuration and execution of the command-line subcommands.
"""

from .run_config import RunConfig, Subcommand, OutputFormat, load_config_header
from .executor import RunExecutor, RunResult, run

__all__ = [
    'RunConfig',
    'Subcommand',
    'OutputFormat',
    'load_config_header',
    'RunExecutor',
    'RunResult',
    'run',
]

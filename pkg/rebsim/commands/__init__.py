"""
Command handlers behind the CLI subcommands
"""
from rebsim.commands.device import cmd_params
from rebsim.commands.simulation import cmd_pareto, cmd_run, cmd_sweep

__all__ = ["cmd_params", "cmd_pareto", "cmd_run", "cmd_sweep"]

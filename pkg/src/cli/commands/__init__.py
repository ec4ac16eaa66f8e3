"""Subcommand modules; each exposes register(subparsers)."""

from src.cli.commands import attack, classgroup, experiment, keys, params

COMMAND_MODULES = [params, classgroup, keys, attack, experiment]

__all__ = ['COMMAND_MODULES']

"""Shielded pursuit-evasion: barrier-function safety filter around a TD3 evader."""

__version__ = "0.1.0"
CODE_VERSION = f"pursuitshield {__version__}"

"""Growth forms of periodic, multigrid and substitution tilings."""

__version__ = "0.1.0"

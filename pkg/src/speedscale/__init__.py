"""Speedscale - energy-minimizing non-preemptive speed scaling on m processors."""

__version__ = "0.1.0"

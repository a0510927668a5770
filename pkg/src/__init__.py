"""pmech: p-mechanics numerics on the Heisenberg group."""

__version__ = "0.1.0"

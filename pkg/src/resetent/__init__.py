"""Steady-state entanglement of interacting qubits under noise and local reset."""

__version__ = "0.1.0"

from .entanglement import average_negativity, negativity
from .models import ModelConfig, validate
from .solver import propagate, spectrum, steady_state

__all__ = ["ModelConfig", "average_negativity", "negativity", "propagate", "spectrum", "steady_state", "validate"]

"""Rotation numbers, Kauffman state sums and the normalized multi-variable
Alexander polynomial of transverse spatial graph diagrams."""

from .diagram import Diagram, decorate, faces, parse, serialize
from .fixtures import load_fixture
from .invariant import alexander
from .rotation import rot, winding_numbers
from .statesum import state_sum

__all__ = ["Diagram", "alexander", "decorate", "faces", "load_fixture", "parse", "rot", "serialize",
           "state_sum", "winding_numbers"]
__version__ = "0.1.0"

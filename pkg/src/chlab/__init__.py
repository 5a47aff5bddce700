"""Conservative Camassa-Holm simulations in Eulerian and Lagrangian coordinates."""

__version__ = "0.1.0"

"""Affine lifted abstractions of polynomial control systems.

The package synthesizes affine lifted (Koopman-style) abstractions of
polynomial systems with sum-of-squares certificates, verifies the simulation
preorder between two affine lifted systems, and validates behavior containment
on sampled trajectories.
"""

__version__ = "0.1.0"

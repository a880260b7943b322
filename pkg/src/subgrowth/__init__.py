"""subgrowth: exact subgroup-growth invariants at desk scale.

Modules:
    rootsys     root systems, Dynkin diagrams, R(X) and gamma
    parab       standard parabolic subgroups, exponents, exact indices
    abcount     subgroup counting for finite abelian groups
    extremal    the abelian extremal problem, exact and heuristic
    fingrp      explicit finite matrix groups over Z/m
    invariants  group descriptors, gamma lookup, inner-form degrees
    cli         command-line front end
"""

from .errors import ResourceRefusal, ValidationError
from .rootsys import LieType, parse_lie_type

__all__ = ["LieType", "parse_lie_type", "ValidationError", "ResourceRefusal"]

__version__ = "0.1.0"

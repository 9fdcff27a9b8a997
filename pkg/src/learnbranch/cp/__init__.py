from .constraints import (N_CONSTRAINT_TYPES, Constraint, DPTransition,
                          LessOrEqual, NotEqual)
from .domain import ChangeEvent, Domain, IntVar
from .model import CPModel
from .trail import StateBool, StateInt, Trailer

__all__ = [
    "CPModel", "ChangeEvent", "Constraint", "DPTransition", "Domain",
    "IntVar", "LessOrEqual", "NotEqual", "N_CONSTRAINT_TYPES", "StateBool",
    "StateInt", "Trailer",
]

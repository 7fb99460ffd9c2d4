"""Dynamic graph algorithms with worst-case update-time guarantees."""
from .core import (Edge, OpKind, RandomSource, Status, SteppableUpdater, UpdateOp,
                   WorkMeter, bernoulli, canonical, charge)
from .matching import DynamicMatching, MatchingConfig
from .spanner import Spanner

__all__ = ["Edge", "OpKind", "RandomSource", "Status", "SteppableUpdater",
           "UpdateOp", "WorkMeter", "bernoulli", "canonical", "charge",
           "DynamicMatching", "MatchingConfig", "Spanner"]

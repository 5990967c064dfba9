"""Ground cost of the transport distance and its gradient in the perturbed point.

Perturbations never change labels, so the cost is a power of the Euclidean
distance between feature vectors; calling it on points with different labels
signals a broken sampler contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledSample
from .errors import DegeneratePoint, DimensionMismatch, InvalidConfig, LabelMismatch


def cost_features(x: np.ndarray, z: np.ndarray, power: int) -> float:
    """||z - x||_2^power on raw feature arrays (no label checks)."""
    diff = z - x
    sq = float(diff @ diff)
    return sq if power == 2 else math.sqrt(sq)


@dataclass(frozen=True)
class GroundCost:
    """c(xi, zeta) = ||x - x'||_2^p with p in {1, 2}; default p = 2."""

    power: int = 2

    def __post_init__(self):
        if int(self.power) not in (1, 2):
            raise InvalidConfig("cost power must be 1 or 2")
        object.__setattr__(self, "power", int(self.power))

    def _features(self, xi: LabeledSample, zeta: LabeledSample):
        if xi.dim != zeta.dim:
            raise DimensionMismatch(f"point dimensions differ: {xi.dim} vs {zeta.dim}")
        if xi.label != zeta.label:
            raise LabelMismatch(
                f"labels differ ({xi.label} vs {zeta.label}); perturbations must preserve labels"
            )
        return xi.features, zeta.features

    def cost(self, xi: LabeledSample, zeta: LabeledSample) -> float:
        x, z = self._features(xi, zeta)
        return cost_features(x, z, self.power)

    def grad_zeta(self, xi: LabeledSample, zeta: LabeledSample) -> np.ndarray:
        """Gradient of the cost w.r.t. zeta's features: 2(x'-x) for p=2,
        (x'-x)/||x'-x|| for p=1 (undefined at coinciding points)."""
        x, z = self._features(xi, zeta)
        diff = z - x
        if self.power == 2:
            return 2.0 * diff
        norm = math.sqrt(float(diff @ diff))
        if norm == 0.0:
            raise DegeneratePoint("p=1 cost gradient undefined at coinciding points")
        return diff / norm

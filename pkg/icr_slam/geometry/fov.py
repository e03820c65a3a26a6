"""
Convex field-of-view polygons and their signed distance function.

The signed distance is negative inside the polygon, positive outside and
zero on the boundary. It is computed edge-exactly from point-to-segment
distances.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from icr_slam.errors import InvalidInputError

logger = logging.getLogger(__name__)

# Two edge distances closer than this are treated as a tie (medial axis)
KINK_TOLERANCE = 1e-12


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class FovPolygon:
    """Convex polygon in the robot body frame, vertices counterclockwise.

    Clockwise input is reversed on construction. Polygons with fewer than
    three vertices, repeated or collinear vertices, or a reflex corner are
    rejected.
    """
    vertices: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise InvalidInputError("FoV polygon needs at least 3 two-dimensional vertices")
        if not np.all(np.isfinite(verts)):
            raise InvalidInputError("FoV polygon vertices must be finite")
        if _signed_area(verts) < 0:
            verts = verts[::-1].copy()
        edges = np.roll(verts, -1, axis=0) - verts
        turns = _cross(edges, np.roll(edges, -1, axis=0))
        if np.any(turns <= 0):
            raise InvalidInputError("FoV polygon must be strictly convex with a nonempty interior")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def isosceles_triangle(cls, height: float, apex_angle: float) -> "FovPolygon":
        """Triangle with its apex at the body origin and its axis along +x.

        Args:
            height: Distance from apex to base, meters
            apex_angle: Angle between the two legs, radians

        Returns:
            The FoV polygon
        """
        if height <= 0 or not 0 < apex_angle < np.pi:
            raise InvalidInputError("triangle FoV needs height > 0 and 0 < apex_angle < π")
        half_width = height * np.tan(apex_angle / 2.0)
        return cls(np.array([[0.0, 0.0], [height, -half_width], [height, half_width]]))

    @property
    def edges(self) -> np.ndarray:
        """Array of shape (n, 2, 2): edge i runs from vertex i to vertex i+1."""
        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def contains(self, q: Sequence[float]) -> bool:
        """Closed point-in-polygon test (boundary counts as inside)."""
        return signed_distance(q, self) <= 0.0

    def to_list(self) -> list:
        return self.vertices.tolist()


def _signed_area(verts: np.ndarray) -> float:
    return 0.5 * float(np.sum(_cross(verts, np.roll(verts, -1, axis=0))))


class SignedDistance(NamedTuple):
    """Signed distance together with its gradient with respect to the query point."""
    distance: float
    gradient: np.ndarray
    at_kink: bool


def _edge_projection(q: np.ndarray, fov: FovPolygon):
    a = fov.vertices
    ab = np.roll(a, -1, axis=0) - a
    aq = q - a
    t = np.clip(np.einsum("ij,ij->i", aq, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
    nearest = a + t[:, None] * ab
    dists = np.linalg.norm(q - nearest, axis=1)
    # For a CCW convex polygon the interior is on the left of every edge
    inside = bool(np.all(_cross(ab, aq) >= 0.0))
    return ab, nearest, dists, inside


def signed_distance(q: Sequence[float], fov: FovPolygon) -> float:
    """Signed distance from a body-frame point to the FoV boundary.

    Args:
        q: Body-frame point, meters
        fov: Convex FoV polygon

    Returns:
        -min boundary distance inside, +min boundary distance outside
    """
    q = np.asarray(q, dtype=float)
    _, _, dists, inside = _edge_projection(q, fov)
    d = float(np.min(dists))
    return -d if inside else d


def signed_distance_with_gradient(q: Sequence[float], fov: FovPolygon) -> SignedDistance:
    """Signed distance and ∂d/∂q.

    The gradient is the unit vector from the nearest boundary point, sign
    adjusted; ties between edges are broken by the lowest edge index and
    reported through ``at_kink``. On the boundary itself the outward edge
    normal is used.
    """
    q = np.asarray(q, dtype=float)
    ab, nearest, dists, inside = _edge_projection(q, fov)
    idx = int(np.argmin(dists))
    dist = float(dists[idx])
    order = np.sort(dists)
    at_kink = inside and len(order) > 1 and (order[1] - order[0]) <= KINK_TOLERANCE and dist > 0.0

    if dist > 0.0:
        direction = (q - nearest[idx]) / dist
    else:
        edge = ab[idx]
        direction = np.array([edge[1], -edge[0]]) / np.linalg.norm(edge)

    if inside and dist > 0.0:
        return SignedDistance(-dist, -direction, at_kink)
    return SignedDistance(dist, direction, at_kink)

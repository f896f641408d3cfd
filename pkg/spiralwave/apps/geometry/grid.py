import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from spiralwave.core import settings

from .surface import SurfaceOfRevolution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialGrid:
    """
    Sample points in [0, s_star].

    nodes[0] = 0 is always present as the tip closure node. For boundaryless
    surfaces nodes[-1] = s_star is the far tip closure node and the grid is an
    exact mirror image about s_star / 2.
    """

    nodes: np.ndarray
    tip_offset: float
    s_star: float
    far_tip: bool

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    def mirror_index(self) -> np.ndarray:
        """Index map i -> j with nodes[j] = s_star - nodes[i] (boundaryless grids only)."""
        if not self.far_tip:
            raise ValueError("Mirror map exists only on boundaryless grids")
        return np.arange(self.size)[::-1]


def _half_nodes(length: float, tip_offset: float, bulk: float, ratio: float) -> np.ndarray:
    points = [0.0, tip_offset]
    step = tip_offset
    while step / ratio < bulk and points[-1] + step / ratio < length:
        step = step / ratio
        points.append(points[-1] + step)
    start = points[-1]
    remaining = length - start
    count = max(1, int(np.ceil(remaining / bulk - 1e-9)))
    uniform = start + remaining * np.arange(1, count + 1) / count
    nodes = np.concatenate([np.asarray(points), uniform])
    nodes[-1] = length
    return nodes


def make_grid(
    S: SurfaceOfRevolution,
    ratio: Optional[float] = None,
    tip_offset_factor: Optional[float] = None,
    bulk_intervals: Optional[int] = None,
) -> RadialGrid:
    """
    Build a grid refined geometrically toward every tip.

    Spacing grows by 1/ratio away from a tip, starting from tip_offset, until it
    reaches the bulk spacing s_star / bulk_intervals.

    Args:
        S: surface
        ratio: geometric ratio in (0, 1)
        tip_offset_factor: first interior node as a fraction of s_star
        bulk_intervals: number of bulk intervals over [0, s_star]

    Returns:
        RadialGrid
    """
    ratio = ratio if ratio is not None else settings.GRID_RATIO
    tip_offset_factor = tip_offset_factor if tip_offset_factor is not None else settings.TIP_OFFSET_FACTOR
    bulk_intervals = bulk_intervals if bulk_intervals is not None else settings.BULK_INTERVALS
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"Grid ratio must lie in (0, 1), got {ratio}")
    if bulk_intervals < 4:
        raise ValueError("At least 4 bulk intervals are required")

    s_star = S.s_star
    tip_offset = tip_offset_factor * s_star
    bulk = s_star / bulk_intervals

    if S.has_boundary:
        nodes = _half_nodes(s_star, tip_offset, bulk, ratio)
    else:
        half = _half_nodes(0.5 * s_star, tip_offset, bulk, ratio)
        nodes = np.concatenate([half, s_star - half[-2::-1]])

    logger.debug(f"Grid on {S.name}: {nodes.size} nodes, tip_offset={tip_offset:.3g}")
    return RadialGrid(nodes=nodes, tip_offset=tip_offset, s_star=s_star, far_tip=not S.has_boundary)

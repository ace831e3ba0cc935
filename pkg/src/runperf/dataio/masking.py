"""Context removal: keep a box of pixels, flood everything else with a fill value."""

from __future__ import annotations

import numpy as np

from .types import FrameBuffer


def bbox_to_pixel_rect(bbox, width: int, height: int) -> tuple[int, int, int, int]:
    """Map a real-valued (cx, cy, w, h) box to a clipped integer rect [x1, x2) x [y1, y2)."""
    cx, cy, w, h = (float(v) for v in bbox)
    x1 = int(round(cx - w / 2.0))
    x2 = int(round(cx + w / 2.0))
    y1 = int(round(cy - h / 2.0))
    y2 = int(round(cy + h / 2.0))
    x1, x2 = max(0, x1), min(width, x2)
    y1, y2 = max(0, y1), min(height, y2)
    if x2 <= x1 or y2 <= y1:
        return 0, 0, 0, 0
    return x1, x2, y1, y2


def mask_context(frame: FrameBuffer, bbox, fill: int = 0) -> FrameBuffer:
    """Copy the pixels inside ``bbox`` and set every pixel outside it to ``fill``.

    A degenerate or fully out-of-frame box yields an all-fill frame.  Output
    dimensions always equal input dimensions, and masking twice with the same
    box equals masking once.
    """
    if not (0 <= fill <= 255):
        raise ValueError(f"fill must be an 8-bit value, got {fill}")
    x1, x2, y1, y2 = bbox_to_pixel_rect(bbox, frame.width, frame.height)
    out = np.full_like(frame.pixels, fill)
    out[y1:y2, x1:x2, :] = frame.pixels[y1:y2, x1:x2, :]
    return FrameBuffer(width=frame.width, height=frame.height, pixels=out)

"""Dataset formats, loaders, context masking, and the synthetic oracle generator."""

from .formats import (
    group_by_frame,
    load_detections,
    load_embeddings,
    load_rpinfo,
    load_split_times,
    save_detections,
    save_embeddings,
    save_rpinfo,
    save_split_times,
    sidecar_path,
)
from .masking import bbox_to_pixel_rect, mask_context
from .synthetic import SynthConfig, SyntheticDataset, generate_synthetic
from .types import (
    CONTEXT_MODES,
    DEFAULT_FEATURE_DIM,
    LOGITS_DIM,
    ClipRecord,
    DataError,
    Detection,
    FrameBuffer,
    RPInfo,
    SplitRecord,
    normalize_feature,
)

__all__ = [
    "CONTEXT_MODES",
    "DEFAULT_FEATURE_DIM",
    "LOGITS_DIM",
    "ClipRecord",
    "DataError",
    "Detection",
    "FrameBuffer",
    "RPInfo",
    "SplitRecord",
    "SynthConfig",
    "SyntheticDataset",
    "bbox_to_pixel_rect",
    "generate_synthetic",
    "group_by_frame",
    "load_detections",
    "load_embeddings",
    "load_rpinfo",
    "load_split_times",
    "mask_context",
    "normalize_feature",
    "save_detections",
    "save_embeddings",
    "save_rpinfo",
    "save_split_times",
    "sidecar_path",
]

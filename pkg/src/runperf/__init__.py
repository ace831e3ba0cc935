"""Runner performance toolkit: tracking-by-detection, split-time
categorization, from-scratch classifiers, and a repeated cross-validation
evaluation protocol over video-clip embeddings."""

__version__ = "0.1.0"

from . import dataio, evalharness, learners, perf, tracker

__all__ = ["dataio", "evalharness", "learners", "perf", "tracker", "__version__"]

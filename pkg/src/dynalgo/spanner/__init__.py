from .filter import NEG, FilterState, filter_params, make_filter
from .spanner import Spanner, SpannerParams, sample_hierarchy, size_shape

__all__ = ["NEG", "FilterState", "filter_params", "make_filter", "Spanner",
           "SpannerParams", "sample_hierarchy", "size_shape"]

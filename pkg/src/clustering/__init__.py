from .kmeans import Segmentation, canonical_labels, kmeans_cosine
from .pipeline import SegmentationResult, cluster_components, k_from_fraction, resolve_sample_size, segment

from .consistency import (REFERENCE_DISTANCES, BenchmarkComparison, ConsistencyHistogram, compare_with_ground_truth,
                          consistency_histogram, reference_for)
from .indices import PairCounts, jaccard_index, pair_counts, pair_counts_bruteforce, rand_index, seg_distance

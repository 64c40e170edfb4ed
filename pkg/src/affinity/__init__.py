from .kernel import (KERNELS, AffinitySample, FullAffinity, build_full_w, build_wk, dump_wk, full_affinity_from_distances,
                     kernel_exponent, load_wk, rows_from_exponents, unit_rows,
                     normalize_rows)

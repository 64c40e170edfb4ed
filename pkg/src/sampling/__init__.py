from .farthest import (FarthestSample, beta_curve, sample_epsilon, sample_fixed_k, sample_from_distances,
                       suggest_k_star)

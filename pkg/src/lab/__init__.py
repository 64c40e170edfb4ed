from .projections import (NystromApproximation, Spectrum, best_rank_k, fss_projection, leverage_projection,
                          leverage_scores, nystrom_projection, orthonormal_basis, projector, pseudo_inverse)
from .report import DEFAULT_LAB_GUARD, LabResult, ProjectionReport, error_curves, matrix_error_curves, write_error_csv
from .spectral import SpectralComparison, compare_with_spectral, nystrom_spectral_segment

from erdlab.spectra.eigen import sym_eig
from erdlab.spectra.ntk import (
    NtkGram,
    Scalarization,
    SpectralSummary,
    ntk_gram,
    ntk_spectrum,
    joint_ntk_spectrum,
    effective_rank,
    normalized_heatmap,
    spectral_summary,
)
from erdlab.spectra.pca import (
    PcaBasis,
    pca_fit,
    pca_project,
    cluster_distance_ratio,
    mean_projected_norm,
)

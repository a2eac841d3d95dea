from erdlab.oracle.gmm import (
    GmmModel,
    BayesDecomposition,
    FloorEstimate,
    ExcessEstimate,
    CouplingEstimate,
    sample_x0,
    posterior_responsibilities,
    posterior_means,
    bayes_predictor,
    bayes_floor,
    signal_noise_decomposition,
    excess_decomposition,
    contamination_fraction,
    w2_coupling_cost,
)

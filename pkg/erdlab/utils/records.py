from erdlab.utils.record import Record


class MetricRecord(Record):
    type = "metrics"
    columns = ("iteration", "loss", "target")


class LossCurveRecord(Record):
    type = "loss_curve"
    columns = ("t", "mse", "floor", "excess", "target", "in_range")


class BayesFloorRecord(Record):
    type = "bayes_floor"
    columns = (
        "target",
        "schedule",
        "weight",
        "t",
        "empirical_mse",
        "bayes_floor",
        "floor_stderr",
        "excess",
        "variant",
        "in_range",
    )


class PhaseRecord(Record):
    type = "phase"
    columns = ("target", "t", "sample_id", "signal_norm", "noise_norm", "contaminated")


class PhaseSummaryRecord(Record):
    type = "phase_summary"
    columns = (
        "target",
        "t",
        "contamination_fraction",
        "mean_signal_norm",
        "mean_noise_norm",
    )


class SpectrumRecord(Record):
    type = "ntk_spectrum"
    columns = ("target", "schedule", "t", "kappa1", "kappa2", "kappa3", "effective_rank")


class JointSpectrumRecord(Record):
    type = "ntk_joint"
    columns = (
        "target",
        "schedule",
        "times",
        "kappa1",
        "kappa2",
        "kappa3",
        "effective_rank",
    )


class PcaRecord(Record):
    type = "pca"
    columns = ("t", "sample_id", "cluster_id", "pc1", "pc2", "target")


class CompareRecord(Record):
    type = "compare"
    columns = (
        "rule",
        "row_type",
        "t",
        "empirical_mse",
        "bayes_floor",
        "excess",
        "weight",
        "tail_mass",
    )


class WeightRecord(Record):
    type = "weights"
    columns = (
        "schedule",
        "target",
        "rule",
        "t",
        "lambda",
        "alpha",
        "sigma",
        "omega",
        "weight",
        "allocation",
    )


class CouplingRecord(Record):
    type = "coupling"
    columns = ("schedule", "t", "empirical", "analytic", "stderr", "rel_error")

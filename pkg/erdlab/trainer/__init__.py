from erdlab.trainer.adam import Adam
from erdlab.trainer.trainer import (
    TrainConfig,
    MetricLog,
    train,
    train_piecewise,
    default_bins,
    validate_bins,
)
from erdlab.trainer.evaluation import (
    CurvePoint,
    PiecewiseModel,
    OraclePredictor,
    evaluate_loss_curve,
)

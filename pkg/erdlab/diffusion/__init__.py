from erdlab.diffusion.schedules import (
    Schedule,
    ScheduleKind,
    LinearSchedule,
    VpSchedule,
    GvpSchedule,
    make_schedule,
    alpha_sigma,
    log_snr,
    corrupt,
    sigma_max,
    time_of_log_snr,
    dlog_snr_dt,
)
from erdlab.diffusion.targets import (
    TargetSpec,
    TargetKind,
    make_target_spec,
    make_target,
    effective_target,
    recoverability,
)
from erdlab.diffusion.weights import (
    WeightRule,
    WeightKind,
    make_weight_rule,
    loss_weight,
    allocation_density,
)

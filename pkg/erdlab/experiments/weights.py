import numpy as np

from erdlab.diffusion.schedules import ScheduleKind, make_schedule
from erdlab.diffusion.targets import TargetKind, make_target_spec
from erdlab.diffusion.weights import WeightKind, allocation_density, make_weight_rule
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.utils import plots
from erdlab.utils.records import WeightRecord


class WeightsExperiment(AbstractExperiment):
    """Closed-form schedule quantities, recoverability and weights for every combination."""

    name = "weights"
    order = 1

    def run(self):
        self.records = list(self.iter_records())
        self.writer.write_records(WeightRecord, self.records)

    def iter_records(self):
        config = self.config
        t_grid = config.t_grid()
        for schedule_kind in ScheduleKind:
            schedule = make_schedule(
                schedule_kind, config.beta_min, config.beta_max, config.lambda_clamp
            )
            alpha, sigma = schedule.alpha_sigma(t_grid)
            lam = schedule.log_snr(t_grid)
            unclamped = np.abs(lam) < schedule.lambda_clamp
            for target_kind in TargetKind:
                target = make_target_spec(target_kind)
                omega = target.recoverability(schedule, t_grid)
                for rule_kind in WeightKind:
                    rule = make_weight_rule(rule_kind, target, schedule, config.gamma)
                    weight = rule(t_grid)
                    allocation = np.full(t_grid.size, np.nan)
                    allocation[unclamped] = allocation_density(rule, target, schedule, lam[unclamped])
                    for index, t in enumerate(t_grid):
                        yield WeightRecord(
                            schedule=str(schedule_kind),
                            target=str(target_kind),
                            rule=str(rule_kind),
                            t=float(t),
                            **{"lambda": float(lam[index])},
                            alpha=float(alpha[index]),
                            sigma=float(sigma[index]),
                            omega=float(omega[index]),
                            weight=float(weight[index]),
                            allocation=None if np.isnan(allocation[index]) else float(allocation[index]),
                        )

    def plot(self):
        config = self.config
        series = {}
        for record in getattr(self, "records", []):
            if record["schedule"] == str(config.schedule) and record["rule"] == str(WeightKind.ERD):
                xs, ys = series.setdefault(f"omega {record['target']}", ([], []))
                xs.append(record["t"])
                ys.append(record["omega"])
        if series:
            self.writer.register(
                plots.line_plot(
                    self.writer.path("weights.svg"), series, "t", "recoverability",
                    title=f"{config.schedule} schedule",
                )
            )

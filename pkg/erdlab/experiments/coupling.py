from erdlab.diffusion.schedules import ScheduleKind, make_schedule
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.oracle.gmm import w2_coupling_cost
from erdlab.utils import plots
from erdlab.utils.records import CouplingRecord
from erdlab.utils.shards import spawn_generators


class CouplingExperiment(AbstractExperiment):
    """Input-degeneration coupling cost against its closed form, per schedule."""

    name = "coupling"
    order = 4

    def run(self):
        config = self.config
        gmm, t_grid = config.gmm(), config.t_grid()
        self.records = []
        for index, schedule_kind in enumerate(ScheduleKind):
            schedule = make_schedule(
                schedule_kind, config.beta_min, config.beta_max, config.lambda_clamp
            )
            generators = spawn_generators(self.context.rng(self.order, index), t_grid.size)
            for t, rng in zip(t_grid, generators):
                estimate = w2_coupling_cost(gmm, schedule, float(t), config.n_mc, rng, config.shards)
                self.records.append(
                    CouplingRecord(
                        schedule=str(schedule_kind),
                        t=float(t),
                        empirical=estimate.empirical,
                        analytic=estimate.analytic,
                        stderr=estimate.stderr,
                        rel_error=estimate.rel_error,
                    )
                )
        self.writer.write_records(CouplingRecord, self.records)

    def plot(self):
        series = {}
        for record in getattr(self, "records", []):
            for column in ("empirical", "analytic"):
                xs, ys = series.setdefault(f"{record['schedule']} {column}", ([], []))
                xs.append(record["t"])
                ys.append(record[column])
        if series:
            self.writer.register(
                plots.line_plot(self.writer.path("coupling.svg"), series, "t", "coupling cost")
            )

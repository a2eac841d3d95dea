from loguru import logger
from tqdm import tqdm

from erdlab.diffusion.targets import TargetKind, make_target_spec
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.oracle.gmm import bayes_floor
from erdlab.trainer.evaluation import evaluate_loss_curve
from erdlab.utils import plots
from erdlab.utils.records import BayesFloorRecord
from erdlab.utils.shards import spawn_generators


class BayesExperiment(AbstractExperiment):
    """Bayes floors for every target, and model MSE against the floor on paired draws."""

    name = "bayes"
    order = 2

    def run(self):
        self.records = []
        self.records.extend(self.oracle_rows())
        if not self.context.oracle_only:
            for target in self.config.targets:
                model = self.context.load_global(target)
                self.records.extend(
                    self.model_rows(target, model, "global", (self.config.t_lo, self.config.t_hi))
                )
                piecewise = self.context.load_piecewise(target)
                if piecewise is not None:
                    self.records.extend(self.model_rows(target, piecewise, "piecewise"))
                else:
                    logger.info(f"No piecewise {target} checkpoints, skipping the piecewise variant")
        self.writer.write_records(BayesFloorRecord, self.records)

    def oracle_rows(self):
        config = self.config
        gmm, schedule, t_grid = config.gmm(), config.schedule_model(), config.t_grid()
        for index, target_kind in enumerate(TargetKind):
            target = make_target_spec(target_kind)
            generators = spawn_generators(self.context.rng(self.order, 0, index), t_grid.size)
            for t, rng in tqdm(
                list(zip(t_grid, generators)),
                desc=f"Bayes floor {target_kind}",
                unit="t",
                disable=not self.context.progress,
            ):
                estimate = bayes_floor(gmm, target, schedule, float(t), config.n_mc, rng, config.shards)
                yield BayesFloorRecord(
                    target=str(target_kind),
                    schedule=str(config.schedule),
                    weight=str(config.weight),
                    t=float(t),
                    bayes_floor=estimate.mse,
                    floor_stderr=estimate.stderr,
                    variant="oracle",
                )

    def model_rows(self, target: str, model, variant: str, trained_range=(0.0, 1.0)):
        config = self.config
        logger.info(f"Evaluating {variant} {target} model against the Bayes floor")
        curve = evaluate_loss_curve(
            model,
            config.gmm(),
            config.target_spec(target),
            config.schedule_model(),
            config.t_grid(),
            config.n_eval,
            self.context.rng(self.order, 1),
            trained_range=trained_range,
            shards=config.shards,
            progress=self.context.progress,
        )
        below = [point.t for point in curve if not point.above_floor]
        if below:
            logger.warning(f"{variant} {target} MSE below the Bayes floor beyond 4 stderr at t={below}")
        for point in curve:
            yield BayesFloorRecord(
                target=str(target),
                schedule=str(config.schedule),
                weight=str(config.weight),
                t=point.t,
                empirical_mse=point.mse,
                bayes_floor=point.floor,
                floor_stderr=point.floor_stderr,
                excess=point.mse - point.floor,
                variant=variant,
                in_range=point.in_range,
            )

    def plot(self):
        series = {}
        for record in getattr(self, "records", []):
            if record["variant"] == "oracle":
                xs, ys = series.setdefault(f"floor {record['target']}", ([], []))
                ys.append(record["bayes_floor"])
            else:
                xs, ys = series.setdefault(f"mse {record['target']} {record['variant']}", ([], []))
                ys.append(record["empirical_mse"])
            xs.append(record["t"])
        if series:
            self.writer.register(
                plots.line_plot(self.writer.path("bayes_floor.svg"), series, "t", "MSE", logy=True)
            )

import numpy as np
from loguru import logger

from erdlab.diffusion.weights import WeightKind
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.trainer.evaluation import evaluate_loss_curve
from erdlab.trainer.trainer import train
from erdlab.utils import plots
from erdlab.utils.records import CompareRecord

TAIL_START = 0.9


class CompareExperiment(AbstractExperiment):
    """One model per weight rule from the same seed, compared on paired evaluation draws."""

    name = "compare"
    uses_model = True
    order = 7

    def run(self):
        config = self.config
        gmm, t_grid = config.gmm(), config.t_grid()
        records, self.curves = [], {}
        for rule_kind in WeightKind:
            train_config = config.train_config(weight=rule_kind)
            logger.info(f"Training with {rule_kind} weighting")
            model, _ = train(train_config, gmm, progress=self.context.progress)
            curve = evaluate_loss_curve(
                model,
                gmm,
                train_config.target,
                train_config.schedule,
                t_grid,
                config.n_eval,
                self.context.rng(self.order),
                shards=config.shards,
            )
            weights = train_config.weight_rule()(t_grid)
            self.curves[str(rule_kind)] = curve

            for point, weight in zip(curve, weights):
                records.append(
                    CompareRecord(
                        rule=str(rule_kind),
                        row_type="curve",
                        t=point.t,
                        empirical_mse=point.mse,
                        bayes_floor=point.floor,
                        excess=point.mse - point.floor,
                        weight=float(weight),
                    )
                )
            mse = float(np.mean([point.mse for point in curve]))
            floor = float(np.mean([point.floor for point in curve]))
            records.append(
                CompareRecord(
                    rule=str(rule_kind),
                    row_type="aggregate",
                    empirical_mse=mse,
                    bayes_floor=floor,
                    excess=mse - floor,
                    tail_mass=float(np.sum(weights[t_grid > TAIL_START])),
                )
            )
            logger.info(f"{rule_kind}: mean excess {mse - floor:.4f}")

        self.writer.write_records(CompareRecord, records)

    def plot(self):
        series = {
            rule: ([point.t for point in curve], [point.mse - point.floor for point in curve])
            for rule, curve in getattr(self, "curves", {}).items()
        }
        if series:
            self.writer.register(
                plots.line_plot(self.writer.path("compare.svg"), series, "t", "excess MSE")
            )

from loguru import logger

from erdlab.experiments.experiment import AbstractExperiment
from erdlab.network.checkpoint import save_checkpoint
from erdlab.trainer.evaluation import CurvePoint, evaluate_loss_curve
from erdlab.trainer.trainer import MetricLog, train, train_piecewise
from erdlab.utils import plots
from erdlab.utils.records import LossCurveRecord, MetricRecord


class TrainExperiment(AbstractExperiment):
    """A global model and one model per bin, for every configured target.

    Logs of all targets share one file per model slot: `metrics.csv` for the
    global models, `metrics_bin<i>.csv` for bin i, told apart by the target column.
    """

    name = "train"
    uses_model = True
    order = 0

    def run(self):
        self.logs: dict[str, list[tuple[str, MetricLog]]] = {}
        curves = []
        for target in self.config.targets:
            curves.extend(self.curve_records(target, self.train_target(target)))

        for stem, logs in self.logs.items():
            self.writer.write_records(
                MetricRecord,
                (
                    MetricRecord(target=target, iteration=iteration, loss=loss)
                    for target, log in logs
                    for iteration, loss in zip(log.iterations, log.losses)
                ),
                name=f"{stem}.csv",
            )
            for iteration in sorted({i for _, log in logs for i in log.curves}):
                self.writer.write_records(
                    LossCurveRecord,
                    (
                        record
                        for target, log in logs
                        if iteration in log.curves
                        for record in self.curve_records(target, log.curves[iteration])
                    ),
                    name=f"{stem}_curve_{iteration}.csv",
                )
        self.writer.write_records(LossCurveRecord, curves)
        logger.info("Training done")

    def train_target(self, target: str) -> list[CurvePoint]:
        config = self.config
        gmm = config.gmm()
        train_config = config.train_config(target=target)
        header = {
            "target": str(target),
            "schedule": str(config.schedule),
            "weight": str(config.weight),
        }

        logger.info(f"Training global {target} model")
        model, log = train(train_config, gmm, progress=self.context.progress)
        self.writer.register(
            save_checkpoint(self.context.global_checkpoint(target), model, train_config.t_range, **header)
        )
        self.logs.setdefault("metrics", []).append((str(target), log))

        if config.piecewise:
            logger.info(f"Training piecewise {target} models over {len(config.bins)} bins")
            results = train_piecewise(train_config, config.bins, gmm, progress=self.context.progress)
            for index, (t_range, bin_model, bin_log) in enumerate(results):
                self.writer.register(
                    save_checkpoint(
                        self.context.bin_checkpoint(target, index), bin_model, t_range, **header
                    )
                )
                self.logs.setdefault(f"metrics_bin{index}", []).append((str(target), bin_log))

        return evaluate_loss_curve(
            model,
            gmm,
            train_config.target,
            train_config.schedule,
            config.t_grid(),
            config.n_eval,
            self.context.rng(self.order),
            trained_range=train_config.t_range,
            shards=config.shards,
        )

    @staticmethod
    def curve_records(target: str, curve: list[CurvePoint]) -> list[LossCurveRecord]:
        return [
            LossCurveRecord(
                target=str(target),
                t=point.t,
                mse=point.mse,
                floor=point.floor,
                excess=point.mse - point.floor,
                in_range=point.in_range,
            )
            for point in curve
        ]

    def plot(self):
        series = {
            f"{target} {stem}": (log.iterations, log.losses)
            for stem, logs in getattr(self, "logs", {}).items()
            for target, log in logs
        }
        if series:
            self.writer.register(
                plots.line_plot(self.writer.path("metrics.svg"), series, "iteration", "loss", logy=True)
            )

from loguru import logger

from erdlab.config import ExperimentConfig
from erdlab.experiments import AbstractExperiment, RunContext
from erdlab.utils.manifest import RunManifest
from erdlab.utils.report import ReportWriter


class Driver:
    """Runs experiments in order against one output directory and keeps its manifest current."""

    def __init__(self, config: ExperimentConfig, oracle_only: bool = False, progress: bool = True):
        self.config = config
        self.writer = ReportWriter(config.out_dir)
        self.context = RunContext(config, self.writer, oracle_only=oracle_only, progress=progress)
        self.manifest = RunManifest(self.writer.out_dir, config.as_dict(), config.seed)
        logger.info(f"Writing results to {self.writer.out_dir.resolve()}")

    def run(self, *names: str):
        """Run the named experiments, or all of them in their canonical order."""
        if names:
            experiment_classes = [AbstractExperiment.get_class(name) for name in names]
        else:
            experiment_classes = [
                experiment_class
                for experiment_class in AbstractExperiment.ordered()
                if not (self.context.oracle_only and experiment_class.uses_model)
            ]

        for experiment_class in experiment_classes:
            name = experiment_class.name
            logger.info(f"Running {name}")
            try:
                with self.manifest.timed(name):
                    experiment = experiment_class.create_instance(self.context)
                    experiment.run()
                    if self.config.plot:
                        experiment.plot()
            except Exception:
                logger.error(f"Experiment {name} failed, saving partial manifest")
                self.manifest.add_artifacts(self.writer.written)
                self.manifest.save(status=f"failed: {name}")
                raise
            self.manifest.add_artifacts(self.writer.written)
            logger.info(f"{name.capitalize()} done")

        self.manifest.save()
        return self.manifest

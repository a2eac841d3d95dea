import numpy as np
from loguru import logger

from erdlab.diffusion.schedules import corrupt
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.spectra.pca import cluster_distance_ratio, mean_projected_norm, pca_fit, pca_project
from erdlab.utils import plots
from erdlab.utils.records import PcaRecord

FIT_TIME = 0.1


class PcaExperiment(AbstractExperiment):
    """Hidden representations at several noise levels, projected on one basis fitted at low noise."""

    name = "pca"
    uses_model = True
    order = 6

    def run(self):
        config = self.config
        rng = self.context.rng(self.order)
        self.x0, self.labels = config.gmm().sample(config.pca_samples, rng, return_labels=True)
        self.eps = rng.standard_normal(self.x0.shape)

        records, meta = [], {}
        self.panels = {}
        for target in config.targets:
            target_records, meta[str(target)] = self.run_target(target)
            records.extend(target_records)

        self.writer.write_records(PcaRecord, records)
        self.writer.write_json("pca_meta.json", meta)

    def run_target(self, target: str) -> tuple[list[PcaRecord], dict]:
        config = self.config
        schedule = config.schedule_model()
        model = self.context.load_global(target)
        x0, eps, labels = self.x0, self.eps, self.labels

        def features(t: float) -> np.ndarray:
            x_t = corrupt(schedule, x0, eps, np.full(len(x0), t))
            return model.forward(x_t, np.full(len(x0), t))[1]

        basis = pca_fit(features(FIT_TIME), config.pca_components)
        meta = {
            "fit_time": FIT_TIME,
            "explained_variance": basis.explained_variance.tolist(),
            "explained_ratio": basis.explained_ratio.tolist(),
            "orthonormality_error": basis.orthonormality_error(),
            "mean_projected_norm": {},
            "cluster_distance_ratio": {},
        }

        records = []
        for t in config.pca_times:
            projections = pca_project(basis, features(t))
            key = f"{t:g}"
            meta["mean_projected_norm"][key] = mean_projected_norm(projections)
            meta["cluster_distance_ratio"][key] = cluster_distance_ratio(projections, labels)
            logger.debug(
                f"PCA {target} t={t:g}: mean norm {meta['mean_projected_norm'][key]:.3f}, "
                f"cluster ratio {meta['cluster_distance_ratio'][key]:.3f}"
            )
            second = projections[:, 1] if basis.n_components > 1 else [None] * len(projections)
            records.extend(
                PcaRecord(
                    target=str(target),
                    t=float(t),
                    sample_id=sample_id,
                    cluster_id=int(label),
                    pc1=float(pc1),
                    pc2=None if pc2 is None else float(pc2),
                )
                for sample_id, (label, pc1, pc2) in enumerate(zip(labels, projections[:, 0], second))
            )
            if basis.n_components > 1:
                self.panels.setdefault(str(target), {})[f"t={t:g}"] = (
                    projections[:, 0],
                    projections[:, 1],
                    labels,
                )
        return records, meta

    def plot(self):
        for target, panels in getattr(self, "panels", {}).items():
            self.writer.register(
                plots.scatter_panels(self.writer.path(f"pca_{target}.svg"), panels, "PC1", "PC2")
            )

import numpy as np
from loguru import logger
from tqdm import tqdm

from erdlab.diffusion.schedules import corrupt
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.spectra.ntk import (
    effective_rank,
    joint_ntk_spectrum,
    normalized_heatmap,
    ntk_gram,
    ntk_spectrum,
    spectral_summary,
)
from erdlab.utils import plots
from erdlab.utils.records import JointSpectrumRecord, SpectrumRecord

TOP_K = 3


class NtkExperiment(AbstractExperiment):
    """Fixed-noise and joint NTK spectra of each global model, plus normalized heatmaps."""

    name = "ntk"
    uses_model = True
    order = 5

    def run(self):
        config = self.config
        rng = self.context.rng(self.order)
        x0, labels = config.gmm().sample(config.ntk_points, rng, return_labels=True)
        eps = rng.standard_normal(x0.shape)
        # Cluster-major order makes block structure visible in the heatmaps
        order = np.argsort(labels, kind="stable")
        self.x0, self.eps = x0[order], eps[order]

        self.records, self.heatmaps, summaries, joint_records = [], {}, {}, []
        for target in config.targets:
            records, joint_record = self.run_target(target)
            summary = spectral_summary(
                [record["t"] for record in records],
                [record["kappa1"] for record in records],
                [record["effective_rank"] for record in records],
            )
            logger.info(
                f"{target}: kappa1 vs t Spearman {summary.spearman_kappa1:.3f}, effective rank "
                f"{summary.erank_low:.2f} at t={summary.t_low:g} -> {summary.erank_high:.2f} at t={summary.t_high:g}"
            )
            summaries[str(target)] = summary.as_dict()
            self.records.extend(records)
            joint_records.append(joint_record)

        self.writer.write_records(SpectrumRecord, self.records)
        self.writer.write_records(JointSpectrumRecord, joint_records)
        self.writer.write_json("ntk_summary.json", summaries)
        for label, matrix in self.heatmaps.items():
            self.writer.write_matrix(f"heatmap_{label}.csv", matrix)

    def run_target(self, target: str) -> tuple[list[SpectrumRecord], JointSpectrumRecord]:
        config = self.config
        schedule = config.schedule_model()
        model = self.context.load_global(target)
        provenance = {"checkpoint": f"{target}/global.erdl", "seed": model.seed}

        def points(t: float) -> np.ndarray:
            return corrupt(schedule, self.x0, self.eps, np.full(len(self.x0), t))

        records = []
        for t in tqdm(
            config.t_grid(), desc=f"NTK spectra {target}", unit="t", disable=not self.context.progress
        ):
            gram = ntk_gram(model, points(float(t)), float(t), config.scalarization, provenance)
            kappa = ntk_spectrum(gram, TOP_K)
            records.append(
                SpectrumRecord(
                    target=str(target),
                    schedule=str(config.schedule),
                    t=float(t),
                    kappa1=float(kappa[0]),
                    kappa2=float(kappa[1]),
                    kappa3=float(kappa[2]),
                    effective_rank=effective_rank(gram.eigenvalues),
                )
            )

        for t in config.ntk_times:
            gram = ntk_gram(model, points(t), t, config.scalarization, provenance)
            self.heatmaps[f"{target}_{t:g}"] = normalized_heatmap(gram)

        # Joint kernel: time-major blocks over the coarse noise levels
        times = np.repeat(np.asarray(config.ntk_times, dtype=np.float64), len(self.x0))
        joint_points = np.concatenate([points(t) for t in config.ntk_times])
        joint = ntk_gram(model, joint_points, times, config.scalarization, provenance)
        kappa, joint_rank = joint_ntk_spectrum(joint, TOP_K)
        self.heatmaps[f"{target}_joint"] = normalized_heatmap(joint)
        joint_record = JointSpectrumRecord(
            target=str(target),
            schedule=str(config.schedule),
            times=";".join(f"{t:g}" for t in config.ntk_times),
            kappa1=float(kappa[0]),
            kappa2=float(kappa[1]),
            kappa3=float(kappa[2]),
            effective_rank=joint_rank,
        )
        return records, joint_record

    def plot(self):
        records = getattr(self, "records", [])
        if not records:
            return
        series = {}
        for record in records:
            xs, ys = series.setdefault(f"{record['target']} kappa1", ([], []))
            xs.append(record["t"])
            ys.append(record["kappa1"])
        self.writer.register(
            plots.line_plot(self.writer.path("ntk_spectrum.svg"), series, "t", "eigenvalue", logy=True)
        )
        for label, matrix in self.heatmaps.items():
            self.writer.register(
                plots.heatmap(self.writer.path(f"heatmap_{label}.svg"), matrix, title=label)
            )

import numpy as np
from tqdm import tqdm

from erdlab.diffusion.targets import TargetKind, make_target_spec
from erdlab.experiments.experiment import AbstractExperiment
from erdlab.oracle.gmm import contamination_fraction, signal_noise_decomposition
from erdlab.utils import plots
from erdlab.utils.records import PhaseRecord, PhaseSummaryRecord

PLOT_TIMES = (0.05, 0.5, 0.95)


class PhaseExperiment(AbstractExperiment):
    """Signal-noise phase space: ||E[y|x_t]|| against ||y - E[y|x_t]|| per sample."""

    name = "phase"
    order = 3

    def run(self):
        config = self.config
        gmm, schedule, t_grid = config.gmm(), config.schedule_model(), config.t_grid()
        rng = self.context.rng(self.order)
        # One fixed sample set, followed through every noise level
        x0 = gmm.sample(config.phase_samples, rng)
        eps = rng.standard_normal(x0.shape)

        records, summaries = [], []
        self.panels = {}
        for target_kind in TargetKind:
            target = make_target_spec(target_kind)
            for t in tqdm(t_grid, desc=f"Phase {target_kind}", unit="t", disable=not self.context.progress):
                decomposition = signal_noise_decomposition(gmm, target, schedule, float(t), x0, eps)
                contaminated = decomposition.contaminated
                records.extend(
                    PhaseRecord(
                        target=str(target_kind),
                        t=float(t),
                        sample_id=sample_id,
                        signal_norm=float(signal),
                        noise_norm=float(noise),
                        contaminated=bool(flag),
                    )
                    for sample_id, (signal, noise, flag) in enumerate(
                        zip(decomposition.signal_norm, decomposition.noise_norm, contaminated)
                    )
                )
                summaries.append(
                    PhaseSummaryRecord(
                        target=str(target_kind),
                        t=float(t),
                        contamination_fraction=contamination_fraction(decomposition),
                        mean_signal_norm=float(np.mean(decomposition.signal_norm)),
                        mean_noise_norm=float(np.mean(decomposition.noise_norm)),
                    )
                )
                if any(np.isclose(t, plot_t) for plot_t in PLOT_TIMES):
                    self.panels[f"{target_kind} t={t:g}"] = (
                        decomposition.signal_norm,
                        decomposition.noise_norm,
                        contaminated.astype(int),
                    )

        self.writer.write_records(PhaseRecord, records)
        self.writer.write_records(PhaseSummaryRecord, summaries)

    def plot(self):
        if getattr(self, "panels", None):
            self.writer.register(
                plots.scatter_panels(
                    self.writer.path("phase.svg"),
                    self.panels,
                    "signal norm",
                    "noise norm",
                    diagonal=True,
                )
            )

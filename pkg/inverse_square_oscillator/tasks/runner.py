"""
Task runner: one method per command-line task, each writing its artifacts
into the configured output directory.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List

import numpy as np

from inverse_square_oscillator.config.config_loader import RunConfig
from inverse_square_oscillator.physics.classical import (
    ClassicalState,
    energy_drift,
    measure_period,
    sample_trajectory,
)
from inverse_square_oscillator.physics.model import NAMED_UNITARIES, exponents_from_coupling
from inverse_square_oscillator.quantum.dynamics import (
    copy_sequence,
    display_grid,
    evolve,
    expand,
    gaussian_packet,
    probability_current_at_origin,
    synthesize,
)
from inverse_square_oscillator.quantum.eigenbasis import Sigma1Basis, eigenstate_family
from inverse_square_oscillator.quantum.propagator import (
    KernelRequest,
    kernel_closed,
    kernel_spectral_extrapolated,
    spectral_terms_needed,
)
from inverse_square_oscillator.quantum.spectrum import degenerate_levels, merged_levels, spectral_family
from inverse_square_oscillator.tasks.selftest import run_selftest
from inverse_square_oscillator.utils.exceptions import ConfigError, ParameterError
from inverse_square_oscillator.utils.logger import create_progress_bar, logger
from inverse_square_oscillator.utils.output import write_csv, write_json


class TaskRunner:
    """Class for running one configured task."""

    def __init__(self, config: RunConfig):
        """
        Initialize the task runner.

        Args:
            config (RunConfig): Validated run configuration
        """
        self.config = config
        self.params = config.params
        self.exps = exponents_from_coupling(config.params, limit_test=config.limit_test)
        self.options = config.options
        self.output_dir = Path(config.output)

    def run(self) -> Dict[str, Any]:
        """
        Dispatch to the configured task.

        Returns:
            Dict[str, Any]: Short summary for the closing panel
        """
        tasks: Dict[str, Callable[[], Dict[str, Any]]] = {
            "classical": self.run_classical,
            "spectrum": self.run_spectrum,
            "eigenstates": self.run_eigenstates,
            "kernel": self.run_kernel,
            "evolve": self.run_evolve,
            "copy-demo": self.run_copy_demo,
            "selftest": self.run_selftest,
        }
        logger.info(f"Running task {self.config.task} (a = {self.exps.a:.12g}, "
                    f"profile {self.config.tolerance_profile}, {self.config.threads} thread(s))")
        return tasks[self.config.task]()

    def _map(self, description: str, func: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """Apply func to items on up to ISQ_THREADS workers, results in input order."""
        items = list(items)
        results: List[Any] = [None] * len(items)
        with create_progress_bar() as progress, ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            task = progress.add_task(description, total=len(items))
            futures = [pool.submit(func, item) for item in items]
            for i, future in enumerate(futures):
                results[i] = future.result()
                progress.update(task, advance=1)
        return results

    def _path(self, name: str) -> Path:
        return self.output_dir / name

    def _require_sigma1(self):
        if not np.allclose(self.config.boundary.U, NAMED_UNITARIES["sigma1"]):
            raise ConfigError(f"task {self.config.task} is defined for U = sigma1 only")

    def run_classical(self) -> Dict[str, Any]:
        """Integrate one trajectory and write (t, x, x_closed, E)."""
        opts = self.options
        initial = ClassicalState(x=float(opts["x0"]), v=float(opts["v0"]), t=0.0)
        dt = float(opts["dt"])
        steps = int(round(float(opts["periods"]) * math.pi / (self.params.omega * dt)))
        sample = sample_trajectory(initial, dt, steps, self.params, sample_every=int(opts["sample_every"]))
        write_csv(self._path("classical.csv"), self.config.to_dict(), ("t", "x", "x_closed", "E"), sample.rows())

        summary = {"energy": sample.constants.E, "max_closed_form_deviation": sample.max_deviation,
                   "energy_drift": energy_drift(sample.states, self.params)}
        if float(opts["periods"]) >= 2.0:
            summary["period"] = measure_period(sample.states)
        return summary

    def run_spectrum(self) -> Dict[str, Any]:
        """Solve both branches and write {branch, n, lambda, energy} rows."""
        n_max = int(self.options["n_max"])
        plus, minus = spectral_family(self.config.boundary, self.exps, n_max, self.params)
        levels = [{"branch": branch, "n": n, "lambda": lam, "energy": self.params.energy(lam)}
                  for branch, n, lam in merged_levels(plus, minus)]
        pairs = degenerate_levels(plus, minus)
        write_json(self._path("spectrum.json"), self.config.to_dict(), {
            "L_plus": plus.L,
            "L_minus": minus.L,
            "levels": levels,
            "degenerate_pairs": [list(p) for p in pairs],
        })
        return {"levels": len(levels), "lowest": levels[0]["lambda"], "degenerate_pairs": len(pairs)}

    def run_eigenstates(self) -> Dict[str, Any]:
        """Evaluate each eigenstate on the output grid; s holds the branch label."""
        n_max = int(self.options["n_max"])
        x = display_grid(float(self.options["x_max"]), int(self.options["points"]),
                         self.params.length_scale)
        states = eigenstate_family(self.config.boundary, self.exps, n_max, self.params)
        values = self._map("Evaluating eigenstates", lambda state: state(x), states)

        counters: Dict[str, int] = {"plus": 0, "minus": 0}
        rows = []
        for state, psi in zip(states, values):
            n = counters[state.branch]
            counters[state.branch] += 1
            rows.extend((n, state.branch, state.lam, xi, v.real, v.imag) for xi, v in zip(x, psi))
        write_csv(self._path("eigenstates.csv"), self.config.to_dict(),
                  ("n", "s", "lambda", "x", "re_psi", "im_psi"), rows)
        return {"states": len(states), "grid_points": len(x)}

    def run_kernel(self) -> Dict[str, Any]:
        """Closed-form kernel along x_f, optionally against the extrapolated spectral sum."""
        self._require_sigma1()
        opts = self.options
        x_i, T = float(opts["x_i"]), float(opts["T"])
        x_f = np.linspace(float(opts["x_f_min"]), float(opts["x_f_max"]), int(opts["points"]))
        x_f = x_f[x_f != 0.0]
        if KernelRequest(float(x_f[0]), x_i, T).is_caustic(self.params):
            raise ParameterError(f"T = {T} is a caustic time; the kernel is a distribution there")

        closed = self._map("Closed-form kernel",
                           lambda xf: kernel_closed(KernelRequest(float(xf), x_i, T), self.exps, self.params), x_f)
        columns = ("x_f", "x_i", "T", "re_K", "im_K", "method", "rel_error")
        if not opts["compare"]:
            rows = [(xf, x_i, T, K.real, K.imag, "closed", "") for xf, K in zip(x_f, closed)]
            write_csv(self._path("kernel.csv"), self.config.to_dict(), columns, rows)
            return {"points": len(rows)}

        epsilons = tuple(float(e) for e in opts["epsilons"])
        basis = Sigma1Basis(self.exps, self.params, spectral_terms_needed(min(epsilons)))
        spectral = self._map(
            "Spectral kernel",
            lambda xf: kernel_spectral_extrapolated(float(xf), x_i, T, self.exps, self.params, epsilons, basis),
            x_f)
        rows = []
        worst = 0.0
        for xf, Kc, Ks in zip(x_f, closed, spectral):
            rel = abs(Ks - Kc) / max(abs(Kc), 1e-300)
            worst = max(worst, rel)
            rows.append((xf, x_i, T, Kc.real, Kc.imag, "closed", rel))
            rows.append((xf, x_i, T, Ks.real, Ks.imag, "spectral", rel))
        write_csv(self._path("kernel.csv"), self.config.to_dict(), columns, rows)
        return {"points": len(x_f), "max_rel_error": worst}

    def run_evolve(self) -> Dict[str, Any]:
        """Expand a right-supported Gaussian and write (t, x, |psi|^2) at each requested time."""
        self._require_sigma1()
        opts = self.options
        basis = Sigma1Basis(self.exps, self.params, int(opts["n_max"]))
        packet = expand(gaussian_packet(float(opts["center"]), float(opts["width"])), basis,
                        params=self.params, tol=self.config.quadrature_tol)
        x = display_grid(basis.x_max, int(opts["points"]), self.params.length_scale)
        times = [float(t) for t in opts["times"]]
        snapshots = self._map("Evolving packet", lambda t: evolve(packet, t, self.params), times)

        rows = []
        currents = []
        for t, state in zip(times, snapshots):
            rho = np.abs(synthesize(state, x)) ** 2
            rows.extend((t, xi, r) for xi, r in zip(x, rho))
            currents.append({"t": t, "j_origin": probability_current_at_origin(state, self.params),
                             "norm_coefficients": state.norm_from_coefficients(),
                             "norm_grid": state.norm_from_grid()})
        write_csv(self._path("evolve.csv"), self.config.to_dict(), ("t", "x", "rho"), rows)
        write_json(self._path("evolve.json"), self.config.to_dict(),
                   {"residual": packet.residual, "snapshots": currents})
        return {"times": len(times), "residual": packet.residual}

    def run_copy_demo(self) -> Dict[str, Any]:
        """Density snapshots at T = k pi / omega and the mass split per step."""
        self._require_sigma1()
        opts = self.options
        sequence = copy_sequence(float(opts["width"]), float(opts["center"]), self.exps.a,
                                 int(opts["k_max"]), int(opts["n_max"]), self.params)
        x_max = sequence[0][1].basis.x_max
        x = display_grid(x_max, int(opts["points"]), self.params.length_scale)
        blocks = []
        summary = []
        for report, state in sequence:
            rho = np.abs(synthesize(state, x)) ** 2
            blocks.append((f"k={report.k}", [(report.k, xi, r) for xi, r in zip(x, rho)]))
            summary.append({"k": report.k, "mass_right": report.mass_right, "mass_left": report.mass_left,
                            "l1_error": report.l1_error, "predicted_right": report.predicted_right,
                            "predicted_left": report.predicted_left})
        write_csv(self._path("copy_demo.csv"), self.config.to_dict(), ("k", "x", "rho"), blocks, blocks=True)
        write_json(self._path("copy_demo.json"), self.config.to_dict(),
                   {"residual": sequence[0][0].residual, "steps": summary})
        last = summary[-1]
        return {"k": last["k"], "mass_right": last["mass_right"], "mass_left": last["mass_left"],
                "l1_error": last["l1_error"]}

    def run_selftest(self) -> Dict[str, Any]:
        """Run the invariant checks, print the table and write selftest.json."""
        results = run_selftest(self.config)
        write_json(self._path("selftest.json"), self.config.to_dict(),
                   {"checks": [r.to_dict() for r in results]})
        failed = [r for r in results if not r.passed]
        if failed:
            failed[0].raise_failure()
        return {"checks": len(results), "failed": 0}

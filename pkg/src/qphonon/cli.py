"""Command-line entry point: ``qphonon <command> [--config FILE] [overrides]``."""
from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__, kernels
from .circuits import build_ansatz, transpile_cnot_to_ecr
from .config import ConfigError, RunConfig, from_dict, load
from .engine import preset
from .experiments import (
    kappa_pipeline,
    mapped_system,
    mitigation_experiment,
    noise_sweep,
    structural_estimates,
    sweep_csv,
    ground_state_parameters,
)
from .hamiltonian import exact_ground_energy, subspace_ground_energy
from .mitigation import strategy_report_csv
from .svg import Series, bar_chart, line_plot
from .thermo import SOURCES, points_to_csv
from .vqe import OPTIMIZERS, Estimator, VqeFailure, convergence_report, history_csv, minimize

Outputs = dict[str, str]


def cmd_hamiltonian(cfg: RunConfig) -> Outputs:
    system = cfg.system.build()
    h = mapped_system(system, cfg.system.levels_per_phonon, cfg.system.penalty_weight)
    report = {
        "width": h.width,
        "terms": len(h.pauli.terms),
        "physical_terms": len(h.physical.terms),
        "hermitian": h.pauli.is_hermitian(),
        "penalty_weight": h.penalty_weight,
    }
    if h.pauli.terms and h.width <= 12:
        report["exact_ground_energy"] = exact_ground_energy(h)
    return {"hamiltonian.txt": h.pauli.dumps(), "hamiltonian_report.json": _json(report)}


def cmd_vqe(cfg: RunConfig) -> Outputs:
    system = cfg.system.build()
    h = mapped_system(system, cfg.system.levels_per_phonon, cfg.system.penalty_weight)
    ansatz = build_ansatz(cfg.ansatz.name, h.width, cfg.ansatz.reps)
    noise = cfg.noise.build()
    mode = Estimator(cfg.shots)
    reference = subspace_ground_energy(h)
    kinds = OPTIMIZERS if cfg.optimizer.compare_all else (cfg.optimizer.build(cfg.seed).kind,)
    outputs: Outputs = {}
    summary = {"ansatz": cfg.ansatz.name, "mode": mode.label, "reference_energy": reference, "runs": {}}
    series = []
    for kind in kinds:
        spec = replace(cfg.optimizer.build(cfg.seed), kind=kind)
        run = minimize(ansatz, h, spec, mode, noise if cfg.noise.preset != "ideal" else None)
        report = convergence_report(run, reference)
        outputs[f"convergence_{kind}.csv"] = history_csv(run)
        summary["runs"][kind] = {
            "best_energy": run.best_energy,
            "gap": abs(run.best_energy - reference),
            "evaluations": run.n_evaluations,
            "converged": run.converged,
            "evaluations_to_tolerance": {str(k): v for k, v in report.evaluations_to_tolerance.items()},
        }
        series.append(Series(kind, list(range(1, len(report.envelope) + 1)), [e - reference + 1e-16 for e in report.envelope]))
    outputs["vqe_summary.json"] = _json(summary)
    outputs["convergence.svg"] = line_plot(series, "VQE convergence", "evaluation", "energy gap (best so far)", log_y=True)
    return outputs


def cmd_noise_sweep(cfg: RunConfig) -> Outputs:
    system = cfg.system.build()
    h = mapped_system(system, cfg.system.levels_per_phonon, penalty_weight=0.0)
    seeds = [cfg.seed + i for i in range(cfg.noise_sweep.seeds)]
    outputs: Outputs = {}
    for name in cfg.noise_sweep.ansatze:
        rows = noise_sweep(h, name, cfg.noise_sweep.fidelities, seeds, cfg.noise_sweep.refine_iterations, cfg.ansatz.reps)
        outputs[f"noise_sweep_{name}.csv"] = sweep_csv(rows)
    return outputs


def _noisy_setup(cfg: RunConfig):
    system = cfg.system.build()
    h = mapped_system(system, cfg.system.levels_per_phonon, penalty_weight=None)
    physical = mapped_system(system, cfg.system.levels_per_phonon, penalty_weight=0.0)
    ansatz = build_ansatz(cfg.ansatz.name, h.width, cfg.ansatz.reps)
    base = ground_state_parameters(ansatz, h, cfg.seed, cfg.optimizer.build(cfg.seed))
    return system, physical, ansatz, base


def cmd_mitigate(cfg: RunConfig) -> Outputs:
    _, physical, ansatz, base = _noisy_setup(cfg)
    noise = cfg.noise.build()
    shots = cfg.shots or cfg.mitigation.shots
    exp = mitigation_experiment(
        physical, ansatz, base.best_parameters, noise, cfg.mitigation.trials, shots, cfg.seed,
        **cfg.mitigation.plan_options(),
    )
    rows = exp.rows()
    chart = bar_chart(
        [r.strategy for r in rows],
        [r.relative_error for r in rows],
        [r.std / abs(exp.reference) for r in rows],
        "Relative error by mitigation strategy",
        "|mean - E_ref| / |E_ref|",
    )
    return {"mitigation.csv": strategy_report_csv(rows), "mitigation.svg": chart}


def cmd_kappa(cfg: RunConfig) -> Outputs:
    system = cfg.system.build()
    thermal = cfg.thermal.build()
    noise = preset(cfg.thermal.noise_preset) if cfg.noise.preset == "ideal" else cfg.noise.build()
    estimates, exact = structural_estimates(
        system, cfg.thermal.sources, noise, cfg.ansatz.name, cfg.thermal.trials,
        cfg.shots or cfg.thermal.shots, cfg.seed, cfg.system.levels_per_phonon,
    )
    curves, calibration = kappa_pipeline(thermal, system, estimates, exact)
    csv = points_to_csv([p for s in cfg.thermal.sources for p in curves[s]])
    series = [
        Series(s, [p.T for p in curves[s]], [p.kappa for p in curves[s]], [p.kappa_std for p in curves[s]])
        for s in cfg.thermal.sources
    ]
    meta = {
        "frequency_scale_rad_per_s": calibration.frequency_scale,
        "kappa_normalization": calibration.normalization,
        "structural_elements": {s: {"value": e.value, "std": e.std} for s, e in estimates.items()},
    }
    return {
        "kappa.csv": csv,
        "kappa.svg": line_plot(series, "Thermal conductivity", "T (K)", "kappa (W/mK, toy units)", log_y=True),
        "kappa_calibration.json": _json(meta),
    }


def cmd_dump_circuit(cfg: RunConfig, transpile: bool = False) -> Outputs:
    width = cfg.system.levels_per_phonon * len(cfg.system.frequencies)
    circuit = build_ansatz(cfg.ansatz.name, width, cfg.ansatz.reps)
    if transpile:
        circuit = transpile_cnot_to_ecr(circuit)
    suffix = "_ecr" if transpile else ""
    return {f"circuit_{cfg.ansatz.name}{suffix}.txt": circuit.dumps()}


COMMANDS: dict[str, Callable[..., Outputs]] = {
    "hamiltonian": cmd_hamiltonian,
    "vqe": cmd_vqe,
    "noise-sweep": cmd_noise_sweep,
    "mitigate": cmd_mitigate,
    "kappa": cmd_kappa,
    "dump-circuit": cmd_dump_circuit,
}


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=float) + "\n"


def _manifest(command: str, cfg: RunConfig, outputs: Outputs) -> str:
    return _json({
        "command": command,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": {
            "qphonon": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "kernel_backend": kernels.BACKEND,
        },
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(outputs.items())},
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qphonon", description="Phonon-scattering VQE and thermal-conductivity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--ansatz", choices=["su2", "custom"])
        p.add_argument("--optimizer", help=f"one of {', '.join(OPTIMIZERS)} or 'all'")
        p.add_argument("--noise-preset", choices=["ideal", "ibm_brisbane", "depolarizing"])
        p.add_argument("--shots", type=int)
        p.add_argument("--source", action="append", choices=list(SOURCES), help="thermal source (repeatable)")
        if name == "dump-circuit":
            p.add_argument("--transpile", action="store_true", help="replace CNOT by ECR")
    return parser


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    data = cfg.to_dict()
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    if args.ansatz is not None:
        data["ansatz"]["name"] = args.ansatz
    if args.optimizer is not None:
        if args.optimizer == "all":
            data["optimizer"]["compare_all"] = True
        else:
            data["optimizer"]["kind"] = args.optimizer
            data["optimizer"]["compare_all"] = False
    if args.noise_preset is not None:
        data["noise"]["preset"] = args.noise_preset
    if args.shots is not None:
        data["shots"] = args.shots
    if args.source:
        data["thermal"]["sources"] = list(dict.fromkeys(args.source))
    return from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config) if args.config else RunConfig().validate()
        cfg = _apply_overrides(cfg, args)
        if args.command == "dump-circuit":
            outputs = cmd_dump_circuit(cfg, args.transpile)
        else:
            outputs = COMMANDS[args.command](cfg)
    except (ConfigError, VqeFailure, ValueError, OSError) as exc:
        print(f"qphonon {args.command}: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    # everything was computed in memory; write only after success
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(outputs.items()):
        (out / name).write_text(text)
    (out / "manifest.json").write_text(_manifest(args.command, cfg, outputs))
    for name in sorted(outputs):
        print(out / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())

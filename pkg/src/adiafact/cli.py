"""Command-line front end: compile, simulate, emit pulses, sweep noise.

Subcommands
-----------
compile   clause system -> penalty/Pauli artifacts + ground oracle summary
run       full adiabatic passage, stage subsample, factor decode + verify
pulses    rf slice table (amplitude, duration), step-equivalence check
spectrum  eigenvalue curves of the interpolated Hamiltonian on an s grid
noise     intrinsic-mode Monte-Carlo fidelity statistics
trotter   split-evolution trace and noise sweep, optional comparison
oracle    brute-force ground set of the compiled penalty, decoded factors

Configuration precedence: command-line flags > --config JSON file >
built-in defaults (which reproduce the reference three-qubit instance:
N=291311, weights (1.2, 4.9, 4), L=100, tau=0.05, sigma=0.05). All numeric
output uses 12 significant digits; every file is byte-stable across reruns
except the optional timestamp header (drop it with --no-timestamp).

Exit codes: 0 success, 2 configuration/resource errors, 3 unsatisfiable
instance, 4 factor-verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import compiler, engine, nmr, noise as noise_lab
from .errors import (
    AdiafactError,
    ConfigError,
    ContractViolationError,
    DecodeVerificationError,
    UnsatisfiableInstanceError,
)

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSATISFIABLE = 3
EXIT_VERIFICATION = 4

_EXIT_CODES = (
    (UnsatisfiableInstanceError, EXIT_UNSATISFIABLE),
    (DecodeVerificationError, EXIT_VERIFICATION),
    (AdiafactError, EXIT_CONFIG),
)

_DOMINANT_POPULATION = 0.25
_ADIABATICITY_FLOOR = 0.5


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved settings shared by all subcommands.

    ``n=None`` selects the built-in N=291311 instance; ``weights=None``
    means per-instance defaults ((1.2, 4.9, 4) built-in, all ones generic).
    """

    n: int | None = None
    m_bits: int | None = None
    n_bits: int | None = None
    weights: tuple[float, ...] | None = None
    steps: int = 100
    tau: float = 0.05
    sigma: float = 0.05
    samples: int = 500
    seed: int = 42
    grid: int = 101
    out: str = "."
    format: str = "rows"
    timestamp: bool = True
    splitting: str = "pulse"

    def __post_init__(self) -> None:
        if self.format not in ("rows", "structured"):
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.splitting not in noise_lab.SPLITTINGS:
            raise ConfigError(f"unknown splitting {self.splitting!r}")

    @property
    def is_builtin(self) -> bool:
        return (self.n is None or self.n == compiler.REFERENCE_N) and \
            self.m_bits is None and self.n_bits is None


def _g(value) -> str:
    """12-significant-digit rendering for all numeric output."""
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def _round12(value: float) -> float:
    return float("%.12g" % value)


def _schedule(config: RunConfig) -> engine.Schedule:
    return engine.Schedule(config.steps, config.tau)


def _compiled(config: RunConfig) -> tuple[compiler.CompiledProblem, compiler.FactoringInstance | None]:
    """Compile the selected instance; returns (problem, generic-instance-or-None)."""
    if config.is_builtin:
        weights = config.weights if config.weights is not None else compiler.REFERENCE_WEIGHTS
        return compiler.reference_problem(weights), None
    if config.n is None or config.m_bits is None or config.n_bits is None:
        raise ConfigError("generic instances need --n, --m-bits and --n-bits")
    instance = compiler.FactoringInstance(config.n, config.m_bits, config.n_bits)
    clause_set = compiler.substitute_complements(compiler.build_bit_equations(instance))
    weights = config.weights
    if weights is None:
        weights = tuple(1.0 for _ in clause_set.clauses)
    return compiler.compile_problem(clause_set, weights), instance


def _problem_pair(problem: compiler.CompiledProblem):
    h0 = engine.transverse_field(problem.hamiltonian.qubit_count)
    return h0, problem.hamiltonian


def _timestamp_line() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_table(config: RunConfig, stem: str, columns: list[str], rows,
                 summary: dict | None = None) -> Path:
    """One tabular artifact: CSV with commented header, or JSON mirror."""
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {k: (_round12(v) if isinstance(v, (float, np.floating)) else v)
               for k, v in (summary or {}).items()}
    if config.format == "structured":
        path = out_dir / f"{stem}.json"
        payload: dict = {}
        if config.timestamp:
            payload["generated"] = _timestamp_line()
        payload["columns"] = columns
        payload["rows"] = [
            [(_round12(v) if isinstance(v, (float, np.floating)) else v) for v in row]
            for row in rows
        ]
        if summary:
            payload["summary"] = summary
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path
    path = out_dir / f"{stem}.csv"
    lines = []
    if config.timestamp:
        lines.append(f"# generated {_timestamp_line()}")
    for key, value in summary.items():
        lines.append(f"# {key} = {_g(value)}")
    lines.append("# columns: " + ",".join(columns))
    for row in rows:
        lines.append(",".join(_g(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_json(config: RunConfig, stem: str, payload: dict) -> Path:
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.json"
    if config.timestamp:
        payload = {"generated": _timestamp_line(), **payload}
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _basis_label(index: int, qubit_count: int) -> str:
    return "|" + format(index, f"0{qubit_count}b") + ">"


def _assignment_from_index(index: int, problem: compiler.CompiledProblem) -> dict[str, int]:
    """Basis index -> variable assignment (qubit 1 = most significant bit).

    Complement-eliminated variables are reconstructed as 1 - partner.
    """
    qubit_count = problem.hamiltonian.qubit_count
    bits = {name: (index >> (qubit_count - qubit)) & 1
            for name, qubit in problem.variable_map}
    for eliminated, kept in reversed(problem.clause_set.eliminations):
        bits[eliminated] = 1 - bits[kept]
    return bits


def _decode_assignment(assignment: dict[str, int],
                       instance: compiler.FactoringInstance | None) -> tuple[int, int]:
    return compiler.decode_factors(assignment, instance)


def cmd_compile(config: RunConfig) -> int:
    problem, instance = _compiled(config)
    path = _write_json(config, "compiled", compiler.compiled_problem_to_dict(problem))
    written = [path.name]
    try:
        ising = compiler.ising_export(problem)
    except ContractViolationError:
        print("ising export skipped: compiled operator has terms beyond 2-local")
    else:
        rows = ([("h", q, 0, c) for q, c in ising["linear"]]
                + [("J", a, b, c) for a, b, c in ising["quadratic"]])
        written.append(_write_table(
            config, "ising", ["kind", "qubit_a", "qubit_b", "coefficient"],
            rows, {"offset": ising["offset"]},
        ).name)

    print(f"variables: {', '.join(f'{name}->qubit {q}' for name, q in problem.variable_map)}")
    for term in problem.hamiltonian.terms:
        label = " ".join(f"Z{q}" for q, _ in term.factors)
        print(f"  {label}: {_g(term.coefficient)}")
    print(f"dropped constant: {_g(problem.dropped_constant)}")

    if len(problem.variable_map) <= 24:
        ground = compiler.brute_force_ground(problem.penalty)
        print(f"ground penalty value: {_g(ground.minimum)}")
        if instance is not None and ground.minimum > 1e-9:
            raise UnsatisfiableInstanceError(
                f"no bit assignment factors N={instance.N} with interior widths "
                f"m={instance.m}, n={instance.n} (minimum penalty {_g(ground.minimum)})"
            )
        for bits in ground.assignments:
            assignment = dict(zip(ground.variables, bits))
            line = " ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            try:
                p, q = _decode_assignment(assignment, instance)
            except (DecodeVerificationError, ConfigError):
                print(f"  {line}")
            else:
                print(f"  {line}  ->  {p} x {q}")
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_run(config: RunConfig) -> int:
    problem, instance = _compiled(config)
    h0, hp = _problem_pair(problem)
    trajectory = engine.run(_schedule(config), h0, hp)
    qubit_count = hp.qubit_count

    pop_columns = [f"pop_{_basis_label(i, qubit_count)}" for i in range(2**qubit_count)]
    rows = [
        (r.step, r.s, *r.populations, r.ground_fidelity, r.energy)
        for r in trajectory.records
    ]
    columns = ["step", "s", *pop_columns, "ground_fidelity", "energy"]
    minimum = trajectory.minimum_fidelity()
    written = [_write_table(config, "trajectory", columns, rows,
                            {"min_ground_fidelity": minimum}).name]
    stage_rows = [
        (stage, r.step, r.s, *r.populations, r.ground_fidelity, r.energy)
        for stage, r in engine.stage_records(trajectory)
    ]
    written.append(_write_table(config, "stages", ["stage", *columns], stage_rows).name)

    print(f"minimum ground-subspace fidelity = {_g(minimum)}")
    if minimum < _ADIABATICITY_FLOOR - 1e-12:
        print(f"WARNING: adiabaticity violated (minimum fidelity {_g(minimum)} "
              f"< {_g(_ADIABATICITY_FLOOR)})")

    populations = trajectory.final.populations
    dominant = [i for i in range(populations.size) if populations[i] >= _DOMINANT_POPULATION]
    if not dominant:
        dominant = [int(np.argmax(populations))]
    print("dominant final populations: " + ", ".join(
        f"{_basis_label(i, qubit_count)} {_g(populations[i])}" for i in dominant))

    target = config.n if config.n is not None else compiler.REFERENCE_N
    factors: set[tuple[int, int]] = set()
    for index in dominant:
        assignment = _assignment_from_index(index, problem)
        p, q = _decode_assignment(assignment, instance)
        factors.add((min(p, q), max(p, q)))
    for p, q in sorted(factors):
        print(f"factors verified: {target} = {p} x {q}")
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_pulses(config: RunConfig) -> int:
    program = nmr.pulse_program(_schedule(config))
    deviation = nmr.verify_step_equivalence(_schedule(config))
    rows = [
        (s.index, _schedule(config).s_values[s.index - 1], s.amplitude, s.duration)
        for s in program.slices
    ]
    path = _write_table(
        config, "pulses", ["slice", "s", "amplitude_hz", "duration_s"], rows,
        {
            "total_duration_s": program.total_duration,
            "max_step_equivalence_deviation": deviation,
            "J12_hz": program.couplings.J12,
            "J23_hz": program.couplings.J23,
            "J13_hz": program.couplings.J13,
        },
    )
    print(f"total duration = {_g(program.total_duration)} s")
    print(f"max step-equivalence deviation = {_g(deviation)}")
    print(f"wrote {path.name}")
    return EXIT_OK


def cmd_spectrum(config: RunConfig) -> int:
    if config.grid < 2:
        raise ConfigError(f"spectrum grid needs >= 2 points, got {config.grid}")
    problem, _ = _compiled(config)
    h0, hp = _problem_pair(problem)
    curve = engine.spectrum(h0, hp, np.linspace(0.0, 1.0, config.grid))
    dim = curve.levels.shape[1]
    rows = [(s, *levels) for s, levels in zip(curve.grid, curve.levels)]
    path = _write_table(
        config, "spectrum", ["s", *[f"level_{k}" for k in range(1, dim + 1)]], rows,
    )
    print(f"wrote {path.name} ({config.grid} grid points, {dim} levels)")
    return EXIT_OK


def _report_rows(schedule: engine.Schedule, report: noise_lab.MonteCarloReport):
    s_grid = [0.0, *schedule.s_values]
    return [
        (l, s_grid[l], report.mean_fidelities[l], report.std_fidelities[l])
        for l in range(len(s_grid))
    ]


def _report_summary(report: noise_lab.MonteCarloReport) -> dict:
    return {
        "mode": report.mode,
        "samples": report.sample_count,
        "relative_sigma": report.relative_sigma,
        "seed": report.seed,
        "final_mean_fidelity": report.final_mean,
        "final_fidelity_std": report.final_std,
        "clamped_draws": report.clamped_draws,
    }


def cmd_noise(config: RunConfig) -> int:
    problem, _ = _compiled(config)
    h0, hp = _problem_pair(problem)
    schedule = _schedule(config)
    model = noise_lab.NoiseModel(config.sigma, config.seed)
    report = noise_lab.monte_carlo(schedule, model, config.samples, h0, hp)
    path = _write_table(config, "noise", ["step", "s", "mean_fidelity", "std_fidelity"],
                        _report_rows(schedule, report), _report_summary(report))
    print(f"intrinsic final-fidelity std = {_g(report.final_std)} "
          f"(mean {_g(report.final_mean)}, {report.sample_count} samples)")
    print(f"wrote {path.name}")
    return EXIT_OK


def cmd_trotter(config: RunConfig, compare: bool = False) -> int:
    problem, _ = _compiled(config)
    h0, hp = _problem_pair(problem)
    schedule = _schedule(config)
    model = noise_lab.NoiseModel(config.sigma, config.seed)

    trace = noise_lab.trotter_run(schedule, splitting=config.splitting, h0=h0, hp=hp)
    trace_rows = [
        (record.step, record.s, tag, fidelity)
        for record in trace.records
        for tag, fidelity in record.substeps
    ]
    written = [_write_table(
        config, "trotter_trace", ["step", "s", "substep", "ground_fidelity"], trace_rows,
        {"splitting": trace.splitting,
         "min_subfidelity": trace.minimum_subfidelity(),
         "final_fidelity": trace.final_fidelity},
    ).name]

    report = noise_lab.trotter_monte_carlo(schedule, model, config.samples,
                                           config.splitting, h0, hp)
    written.append(_write_table(config, "trotter_noise",
                                ["step", "s", "mean_fidelity", "std_fidelity"],
                                _report_rows(schedule, report),
                                _report_summary(report)).name)
    print(f"noiseless minimum sub-step fidelity = {_g(trace.minimum_subfidelity())}")
    print(f"trotter[{config.splitting}] final-fidelity std = {_g(report.final_std)} "
          f"(mean {_g(report.final_mean)}, {report.sample_count} samples)")

    if compare:
        intrinsic = noise_lab.monte_carlo(schedule, model, config.samples, h0, hp)
        print(f"intrinsic final-fidelity std = {_g(intrinsic.final_std)}")
        verdict = "more robust" if intrinsic.final_std < report.final_std else "NOT more robust"
        print(f"intrinsic mode is {verdict} than trotter[{config.splitting}] "
              f"under identical noise")
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_oracle(config: RunConfig) -> int:
    problem, instance = _compiled(config)
    ground = compiler.brute_force_ground(problem.penalty)
    if instance is not None and ground.minimum > 1e-9:
        raise UnsatisfiableInstanceError(
            f"no bit assignment factors N={instance.N} with interior widths "
            f"m={instance.m}, n={instance.n} (minimum penalty {_g(ground.minimum)})"
        )
    rows = []
    for bits in ground.assignments:
        assignment = dict(zip(ground.variables, bits))
        try:
            p, q = _decode_assignment(assignment, instance)
        except (DecodeVerificationError, ConfigError):
            p, q = 0, 0
        rows.append((*bits, ground.minimum, p, q))
    path = _write_table(config, "ground", [*ground.variables, "penalty", "p", "q"], rows)
    print(f"minimum penalty = {_g(ground.minimum)} over {len(ground.variables)} variables")
    print(f"{len(ground.assignments)} ground assignment(s)")
    for row in rows:
        p, q = row[-2], row[-1]
        bits = " ".join(f"{n}={b}" for n, b in zip(ground.variables, row))
        suffix = f"  ->  {p} x {q}" if p else ""
        print(f"  {bits}{suffix}")
    print(f"wrote {path.name}")
    return EXIT_OK


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(data) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "weights" in data and data["weights"] is not None:
        data["weights"] = tuple(float(w) for w in data["weights"])
    return data


def _parse_weights(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse weights {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="FILE", help="JSON config file")
    shared.add_argument("--n", type=int, help="number to factor (default: built-in 291311)")
    shared.add_argument("--m-bits", type=int, help="interior bits of factor p (generic)")
    shared.add_argument("--n-bits", type=int, help="interior bits of factor q (generic)")
    shared.add_argument("--weights", type=str, help="comma-separated clause weights")
    shared.add_argument("--steps", type=int, help="step count L (default 100)")
    shared.add_argument("--tau", type=float, help="step duration (default 0.05)")
    shared.add_argument("--sigma", type=float, help="relative noise level (default 0.05)")
    shared.add_argument("--samples", type=int, help="Monte-Carlo samples (default 500)")
    shared.add_argument("--seed", type=int, help="noise master seed (default 42)")
    shared.add_argument("--grid", type=int, help="spectrum grid points (default 101)")
    shared.add_argument("--out", type=str, help="output directory (default .)")
    shared.add_argument("--format", choices=("rows", "structured"),
                        help="artifact format: csv rows or json (default rows)")
    shared.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp header (golden-file mode)")
    shared.add_argument("--splitting", choices=noise_lab.SPLITTINGS,
                        help="trotter splitting (default pulse)")

    parser = argparse.ArgumentParser(
        prog="adiafact",
        description="Adiabatic factorization simulator: compile, evolve, emit pulses, "
                    "sweep noise.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("compile", "compile the clause system; dump penalty/Pauli artifacts"),
        ("run", "run the adiabatic passage and decode the factors"),
        ("pulses", "emit the rf slice table and verify step equivalence"),
        ("spectrum", "eigenvalue curves on an s grid"),
        ("noise", "intrinsic-mode Monte-Carlo noise sweep"),
        ("trotter", "split-evolution trace and noise sweep"),
        ("oracle", "brute-force ground set of the compiled penalty"),
    ):
        sub = commands.add_parser(name, parents=[shared], help=help_text)
        if name == "trotter":
            sub.add_argument("--compare", action="store_true",
                             help="also run the intrinsic sweep and print both stds")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if args.config:
        settings.update(_load_config_file(args.config))
    overrides = {
        "n": args.n,
        "m_bits": args.m_bits,
        "n_bits": args.n_bits,
        "weights": _parse_weights(args.weights) if args.weights is not None else None,
        "steps": args.steps,
        "tau": args.tau,
        "sigma": args.sigma,
        "samples": args.samples,
        "seed": args.seed,
        "grid": args.grid,
        "out": args.out,
        "format": args.format,
        "splitting": args.splitting,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_timestamp:
        settings["timestamp"] = False
    try:
        return RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "compile":
            return cmd_compile(config)
        if args.command == "run":
            return cmd_run(config)
        if args.command == "pulses":
            return cmd_pulses(config)
        if args.command == "spectrum":
            return cmd_spectrum(config)
        if args.command == "noise":
            return cmd_noise(config)
        if args.command == "trotter":
            return cmd_trotter(config, compare=args.compare)
        if args.command == "oracle":
            return cmd_oracle(config)
        raise ConfigError(f"unknown command {args.command!r}")
    except AdiafactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for exc_type, code in _EXIT_CODES:
            if isinstance(exc, exc_type):
                return code
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

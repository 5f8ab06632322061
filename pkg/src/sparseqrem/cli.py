"""Command-line interface.

Exit status: 0 success, 2 input error, 3 resource cap exceeded, 4 numerical
degeneracy.  Structured output is JSON; timing and curve tables are CSV.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

from . import __version__
from .baselines import mooney_mitigate, rigorous_mitigate
from .distributions import SparseDistribution
from .errors import InputError, NumericalError, SizeCapError
from .mitigator import mitigate
from .noise_model import TensorNoiseModel, synth_uniform
from .observables import expval_normalized, expval_raw, fidelity_from_distributions, parity_observable
from .simulate import (
    apply_noise_exact,
    ghz_ideal,
    grover_ideal,
    mqc_ideal_distributions,
    sample_counts,
    sample_noisy_counts,
    target_amplitude,
)

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4


def _emit(obj, out: str | None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _add_noise_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--noise-p01", type=float, default=None if not required else 0.0, help="P(read 0 | prepared 1)")
    p.add_argument("--noise-p10", type=float, default=None if not required else 0.0, help="P(read 1 | prepared 0)")


def _model(args, width: int) -> TensorNoiseModel | None:
    if getattr(args, "calibration", None):
        model = TensorNoiseModel.from_json_obj(_read_json(args.calibration))
        if model.width != width:
            raise InputError(f"calibration covers {model.width} qubits, data has {width}")
        return model
    if args.noise_p01 is None and args.noise_p10 is None:
        return None
    p01 = args.noise_p01 if args.noise_p01 is not None else args.noise_p10
    p10 = args.noise_p10 if args.noise_p10 is not None else args.noise_p01
    return synth_uniform(width, p01, p10)


def _correction(spec: str) -> tuple[str, int]:
    if spec in ("least-norm", "least_norm"):
        return "least_norm", 1
    if spec == "delta":
        return "delta", 1
    if spec.startswith("delta-exact"):
        _, _, k = spec.partition(":")
        return "delta_exact", int(k or 1)
    raise InputError(f"unknown correction {spec!r}")


def run_method(y: SparseDistribution, model: TensorNoiseModel, method: str, correction: str = "least-norm", **kw):
    """Dispatch a ``--method`` string to the matching mitigator."""
    if method == "rigorous":
        return rigorous_mitigate(y, model)
    if method.startswith("mooney"):
        _, _, t = method.partition(":")
        return mooney_mitigate(y, model, float(t or 0.01))
    if method == "proposed-delta":
        correction = "delta"
    elif method == "proposed-least-norm":
        correction = "least-norm"
    elif method != "proposed":
        raise InputError(f"unknown method {method!r}")
    corr, k = _correction(correction)
    return mitigate(y, model, corr, k=k, **kw)


def cmd_mitigate(args) -> int:
    y = SparseDistribution.from_json_obj(_read_json(args.counts))
    model = _model(args, y.width)
    if model is None:
        raise InputError("give --calibration or --noise-p01/--noise-p10")
    matrix_free = {"auto": None, "yes": True, "no": False}[args.matrix_free]
    report = run_method(
        y, model, args.method, args.correction, d=args.distance, matrix_free=matrix_free, threads=args.threads
    )
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json_obj(), indent=1))
    _emit(report.mitigated.to_json_obj(), args.out)
    return EXIT_OK


def cmd_calibrate_synth(args) -> int:
    _emit(synth_uniform(args.n, args.noise_p01, args.noise_p10).to_json_obj(), args.out)
    return EXIT_OK


def _noisy(ideal: SparseDistribution, args, key) -> SparseDistribution:
    model = _model(args, ideal.width)
    if args.shots == 0:
        return apply_noise_exact(ideal, model) if model else ideal
    if model is None:
        return sample_counts(ideal, args.shots, key)
    return sample_noisy_counts(ideal, model, args.shots, key)


def _dist_out(d: SparseDistribution) -> dict:
    return d.to_json_obj("counts" if d.shots else "probs")


def cmd_ghz_sim(args) -> int:
    _emit(_dist_out(_noisy(ghz_ideal(args.n), args, (args.seed, 0))), args.out)
    return EXIT_OK


def cmd_mqc_sim(args) -> int:
    n_angles = args.angles or 2 * args.n + 2
    signals = [
        _dist_out(_noisy(d, args, (args.seed, 1, j))) for j, d in enumerate(mqc_ideal_distributions(args.n, n_angles))
    ]
    bundle = {
        "schema": "sparseqrem.mqc/1",
        "n": args.n,
        "angles": n_angles,
        "population": _dist_out(_noisy(ghz_ideal(args.n), args, (args.seed, 0))),
        "signals": signals,
    }
    _emit(bundle, args.out)
    return EXIT_OK


def _residual(args) -> int:
    return args.residual_support if args.residual_support is not None else min(64, 2**args.n)


def cmd_grover_sim(args) -> int:
    _, _, theta = target_amplitude(args.n, args.bmax)
    ideal = grover_ideal(args.n, args.m, theta, _residual(args), args.seed)
    _emit(_dist_out(_noisy(ideal, args, (args.seed, args.m, 0))), args.out)
    return EXIT_OK


def cmd_expval(args) -> int:
    p = SparseDistribution.from_json_obj(_read_json(args.counts))
    obs = parity_observable(p.width)
    sigma = None
    method = args.method
    if args.report:
        rep = _read_json(args.report)
        sigma, method = rep.get("sigma"), rep.get("method", method)
    records = []
    if args.convention in ("normalized", "both"):
        value, _ = expval_normalized(p, obs)
        records.append({"convention": "normalized", "value": value})
    if args.convention in ("raw", "both"):
        records.append({"convention": "raw", "value": expval_raw(p, obs)})
    for r in records:
        r.update(schema="sparseqrem.expval/1", sigma=sigma, method=method, n=p.width, element_sum=p.element_sum())
    _emit(records if len(records) > 1 else records[0], args.out)
    return EXIT_OK


def cmd_fidelity(args) -> int:
    bundle = _read_json(args.mqc)
    try:
        population = SparseDistribution.from_json_obj(bundle["population"])
        signals = [SparseDistribution.from_json_obj(s) for s in bundle["signals"]]
    except (KeyError, TypeError) as exc:
        raise InputError("MQC file needs 'population' and 'signals'") from exc
    model = _model(args, population.width)
    method = "raw"
    if model is not None:
        method = args.method
        population = run_method(population, model, method, args.correction).mitigated
        signals = [run_method(s, model, method, args.correction).mitigated for s in signals]
    f, c, i_n = fidelity_from_distributions(population, signals)
    pop = population.get("0" * population.width, 0.0) + population.get("1" * population.width, 0.0)
    _emit({"schema": "sparseqrem.fidelity/1", "F": f, "C": c, "I_n": i_n, "P": pop, "n": population.width, "method": method}, args.out)
    return EXIT_OK


def cmd_mlae(args) -> int:
    from .mlae import ExperimentConfig, run_experiment

    config = ExperimentConfig(
        n=args.n,
        b_max=args.bmax,
        shots=args.shots,
        noise_levels=tuple(args.noise),
        methods=tuple(args.method),
        trials=args.trials,
        seed=args.seed,
        residual_support=_residual(args),
    )
    report = run_experiment(config)
    _emit(_csv(report.to_csv_rows()) if args.format == "csv" else report.to_json_obj(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .benchmark import as_rows, scaling_by_qubits, scaling_by_size

    rows = []
    if args.qubits:
        rows += scaling_by_qubits(args.qubits, args.shots, args.noise, args.rigorous_max_n, args.seed, args.threads)
    if args.sizes:
        rows += scaling_by_size(args.n, args.sizes, threads=args.threads, repeats=args.repeats)
    _emit(_csv(as_rows(rows)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparseqrem", description="Readout error mitigation for sparse distributions")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mitigate", help="mitigate a counts file")
    p.add_argument("--counts", required=True)
    p.add_argument("--calibration")
    _add_noise_flags(p)
    p.add_argument("--method", default="proposed", help="proposed | proposed-delta | proposed-least-norm | rigorous | mooney:T")
    p.add_argument("--correction", default="least-norm", help="least-norm | delta | delta-exact:K")
    p.add_argument("--distance", type=int, default=0, help="Hamming radius for subspace extension")
    p.add_argument("--matrix-free", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_mitigate)

    p = sub.add_parser("calibrate-synth", help="write a uniform synthetic calibration")
    p.add_argument("--n", type=int, required=True)
    _add_noise_flags(p, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate_synth)

    for name, func, help_ in (
        ("ghz-sim", cmd_ghz_sim, "sample a noisy GHZ distribution"),
        ("mqc-sim", cmd_mqc_sim, "sample GHZ population and MQC signal distributions"),
        ("grover-sim", cmd_grover_sim, "sample a modified-Grover outcome distribution"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--shots", type=int, default=8192, help="0 writes exact probabilities")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--calibration")
        _add_noise_flags(p)
        p.add_argument("--out")
        if name == "mqc-sim":
            p.add_argument("--angles", type=int, help="number of angles (default 2n+2)")
        if name == "grover-sim":
            p.add_argument("--m", type=int, required=True)
            p.add_argument("--bmax", type=float, default=0.5)
            p.add_argument("--residual-support", type=int, help="residual support size (default min(64, 2^n))")
        p.set_defaults(func=func)

    p = sub.add_parser("expval", help="parity expectation of a distribution")
    p.add_argument("--counts", required=True)
    p.add_argument("--observable", choices=("parity",), default="parity")
    p.add_argument("--convention", choices=("normalized", "raw", "both"), default="normalized")
    p.add_argument("--report", help="mitigation report supplying sigma")
    p.add_argument("--method", default="raw")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expval)

    p = sub.add_parser("fidelity", help="GHZ fidelity from an MQC bundle")
    p.add_argument("--mqc", required=True)
    p.add_argument("--calibration")
    _add_noise_flags(p)
    p.add_argument("--method", default="proposed")
    p.add_argument("--correction", default="least-norm")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("mlae-sim", help="MLAE estimation error under readout noise")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--bmax", type=float, default=0.5)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.01, 0.03, 0.05])
    p.add_argument("--method", nargs="+", default=["raw", "least_norm"], help="raw least_norm delta rigorous mooney")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--residual-support", type=int, help="residual support size (default min(64, 2^n))")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mlae)

    p = sub.add_parser("bench", help="time the pipeline")
    p.add_argument("--n", type=int, default=65, help="width for the subspace-size sweep")
    p.add_argument("--sizes", type=int, nargs="*", default=[1024, 2048, 4096, 8192])
    p.add_argument("--qubits", type=int, nargs="*", default=[])
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--noise", type=float, default=0.03)
    p.add_argument("--rigorous-max-n", type=int, default=14)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

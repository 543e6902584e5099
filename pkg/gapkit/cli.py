"""Command-line front end.

    gapkit density   --set <DSL> [--radius R] [--json out.json]
    gapkit gap       --set <DSL> [--window N] [--witness out.measure] [--csv scan.csv]
    gapkit gaptest   --measure <file> --b <val> [--csv trace.csv]
    gapkit radius    --set <DSL> [--window N]
    gapkit transport [--set <DSL>] [--measure <file>] --delta <d> --seed <s> --gap <a>
    gapkit verify    <suite|all> [--alpha A --removed "0 mod 3"]
    gapkit schema

Exit codes: 0 pass, 1 fail, 2 usage error. Reports go to stdout unless
--json is given; log lines go to stderr.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from gapkit.completeness.radius import RadiusOptions, radius_estimate
from gapkit.config import Command, RunConfig, load_run_config
from gapkit.density.estimators import DensityOptions, density_report
from gapkit.errors import GapkitError
from gapkit.gap.estimate import GapOptions, gap_characteristic_estimate, lattice_witness
from gapkit.gap.fourier import cauchy_gap_test, ft_gap_scan
from gapkit.gap.witness import full_lattice_step
from gapkit.reports.emit import build_envelope, emit_report, report_schema, write_decay_csv, write_scan_csv
from gapkit.reports.store import ReportStore
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.sets.dsl import load_set
from gapkit.sets.measure import AtomicMeasure, read_measure_file, write_measure_file
from gapkit.transport.interlacing import perturbed_pair
from gapkit.transport.transport import transport_measure, verify_transport
from gapkit.utils import dumps
from gapkit.verify import SUITES, half_integer_pair, run_all, run_verify, transport_witness

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_TRANSPORT_GAP = 2.0
IDENTITY_LIMIT = 1e-3

Outcome = Tuple[Dict[str, Any], bool]


class UsageError(GapkitError):
    """Raised for inputs that are missing or inconsistent on the command line."""


def _require_set(config: RunConfig) -> DiscreteSet:
    if not config.set_spec:
        raise UsageError(f"{config.command} needs --set")
    return load_set(config.set_spec, config.radius)


def _require_measure(config: RunConfig) -> AtomicMeasure:
    if not config.measure_path:
        raise UsageError(f"{config.command} needs --measure")
    return read_measure_file(config.measure_path)


def _prepare(config: RunConfig) -> Dict[str, Any]:
    """Parse every input a command reads; failures here are usage errors."""
    command = Command(config.command)
    inputs: Dict[str, Any] = {}
    if command in (Command.DENSITY, Command.GAP, Command.RADIUS):
        inputs["set"] = _require_set(config)
    elif command == Command.GAPTEST:
        inputs["measure"] = _require_measure(config)
        if config.b is None:
            raise UsageError("gaptest needs --b")
    elif command == Command.TRANSPORT:
        if config.set_spec:
            inputs["set"] = load_set(config.set_spec, config.radius)
        if config.measure_path:
            inputs["measure"] = read_measure_file(config.measure_path)
    elif command == Command.VERIFY:
        if config.suite not in SUITES + ("all",):
            raise UsageError(f"Unknown suite {config.suite!r}; expected one of {', '.join(SUITES)} or all")
        if config.set_spec:
            load_set(config.set_spec, config.radius)
    return inputs


def _density(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    report = density_report(inputs["set"], DensityOptions(radius=config.radius))
    return {"density": report}, report.consistent


def _gap(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    discrete_set = inputs["set"]
    opts = GapOptions(window=config.window, density=DensityOptions(radius=config.radius))
    report = gap_characteristic_estimate(discrete_set, opts)
    results: Dict[str, Any] = {"gap": report}
    wants_measure = config.witness_path is not None or config.csv_path is not None
    if wants_measure and full_lattice_step(discrete_set) is None:
        logger.warning("witness measures are built on full lattices only, skipping --witness/--csv")
    elif wants_measure:
        measure, summary = lattice_witness(discrete_set, config.gap)
        if config.witness_path:
            write_measure_file(measure, config.witness_path)
        if config.csv_path:
            write_scan_csv(measure, (-summary.gap, summary.gap), config.csv_path)
        results["witness"] = summary
    return results, report.agreement


def _gaptest(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    measure: AtomicMeasure = inputs["measure"]
    trace = cauchy_gap_test(measure, config.b)
    results: Dict[str, Any] = {"decay": trace, "atoms": len(measure)}
    if config.b > 0:
        results["scan_sup"] = ft_gap_scan(measure, (-config.b, config.b))
    if config.csv_path:
        write_decay_csv(trace, config.csv_path)
    return results, trace.passed


def _radius(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    opts = RadiusOptions(window=config.window, density=DensityOptions(radius=config.radius))
    report = radius_estimate(inputs["set"], opts)
    return {"radius": report}, report.agreement


def _transport(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    source = inputs.get("measure")
    window = config.window
    if source is None:
        source = transport_witness()
        window = max(window, 512)
    if "set" in inputs:
        pair = perturbed_pair(inputs["set"], config.delta, seed=config.seed, count=window)
    else:
        pair = half_integer_pair(config.delta, config.seed, window)
    a = config.gap if config.gap is not None else DEFAULT_TRANSPORT_GAP

    result = transport_measure(pair, source)
    certificate = verify_transport(result.measure, a)
    if config.witness_path:
        write_measure_file(result.measure, config.witness_path)
    if config.csv_path:
        write_scan_csv(result.measure, (-a, a), config.csv_path)

    c = result.herglotz.c
    herglotz = {
        "poles": len(c),
        "c_min": float(np.min(c)) if len(c) else 0.0,
        "c_positive": bool(np.all(c > 0)),
        "b1": result.herglotz.b1,
        "b2": result.herglotz.b2,
        "weighted_sum_partials": result.herglotz.weighted_sum_partials,
    }
    results = {
        "herglotz": herglotz,
        "anchors": result.anchors,
        "identity_error": result.identity_error,
        "l1_partials": result.l1_partials,
        "atoms": len(result.measure),
        "certificates": [certificate],
    }
    passed = certificate.passed and herglotz["c_positive"] and result.identity_error < IDENTITY_LIMIT
    return results, passed


def _verify(config: RunConfig, inputs: Dict[str, Any]) -> Outcome:
    if config.suite == "all":
        suites = run_all(config)
    else:
        suites = [run_verify(config.suite, config)]
    results = {"suites": [{"suite": s.suite, "passed": s.passed, "checks": s.checks} for s in suites]}
    return results, all(s.passed for s in suites)


COMMANDS: Dict[str, Callable[[RunConfig, Dict[str, Any]], Outcome]] = {
    Command.DENSITY.value: _density,
    Command.GAP.value: _gap,
    Command.GAPTEST.value: _gaptest,
    Command.RADIUS.value: _radius,
    Command.TRANSPORT.value: _transport,
    Command.VERIFY.value: _verify,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    # Defaults stay None so values from --config are not overridden.
    parser.add_argument("--set", dest="set_spec", help="Set in the DSL, e.g. 'lattice:alpha=1'")
    parser.add_argument("--radius", type=float, help="Truncation radius for set windows (default 1000)")
    parser.add_argument("--window", type=int, help="Window size N for oracles and transport (default 256)")
    parser.add_argument("--seed", type=int, help="Seed for every randomized path (default 0)")
    parser.add_argument("--json", dest="json_path", help="Write the JSON report here instead of stdout")
    parser.add_argument("--csv", dest="csv_path", help="Write the plot series here")
    parser.add_argument("--config", dest="config_path", help="JSON file with the same keys as the flags")
    parser.add_argument("--store", help="Also save the report into this report directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gapkit", description="Densities, gaps and completeness radii of separated sequences")
    sub = parser.add_subparsers(dest="command", required=True)

    p_density = sub.add_parser("density", help="Upper and lower Beurling-Malliavin densities")
    _add_common(p_density)

    p_gap = sub.add_parser("gap", help="Gap characteristic by the density, Gram and complement routes")
    _add_common(p_gap)
    p_gap.add_argument("--gap", type=float, help="Witness gap half-width (default 90%% of the lattice bound)")
    p_gap.add_argument("--witness", dest="witness_path", help="Write a gap witness measure file")

    p_gaptest = sub.add_parser("gaptest", help="Cauchy-transform decay test on a measure file")
    _add_common(p_gaptest)
    p_gaptest.add_argument("--measure", dest="measure_path", help="Measure file to test")
    p_gaptest.add_argument("--b", type=float, help="Gap half-width to test")

    p_radius = sub.add_parser("radius", help="Completeness radius by the density formula and the defect oracle")
    _add_common(p_radius)

    p_transport = sub.add_parser("transport", help="Move a gap measure onto a positively perturbed set")
    _add_common(p_transport)
    p_transport.add_argument("--base", dest="set_spec", help="Base set in the DSL (default Z + 1/2)")
    p_transport.add_argument("--measure", dest="measure_path", help="Source measure file (default built-in witness)")
    p_transport.add_argument("--delta", type=float, help="Perturbation bound (default 0.2)")
    p_transport.add_argument("--gap", type=float, help="Gap half-width to certify (default 2)")
    p_transport.add_argument("--witness", dest="witness_path", help="Write the transported measure file")

    p_verify = sub.add_parser("verify", help="Run identity suites")
    _add_common(p_verify)
    p_verify.add_argument("suite", choices=SUITES + ("all",))
    p_verify.add_argument("--delta", type=float, help="Perturbation bound for prop23 and prop24")
    p_verify.add_argument("--alpha", type=float, help="Lattice step for prop22 with --removed")
    p_verify.add_argument("--removed", help="Removed residues for prop22, e.g. '0 mod 3'")
    p_verify.add_argument("--trials", type=int, help="Perturbation trials for prop24")

    p_schema = sub.add_parser("schema", help="Print the JSON schema of reports")
    p_schema.add_argument("-v", "--verbose", action="store_true")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"config_path", "store", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _report_name(config: RunConfig) -> str:
    return f"verify-{config.suite}" if config.suite else str(config.command)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.command == "schema":
        sys.stdout.write(dumps(report_schema()) + "\n")
        return EXIT_PASS

    try:
        config = load_run_config(args.config_path, _overrides(args))
        inputs = _prepare(config)
    except GapkitError as e:
        logger.error(f"usage error: {e}")
        return EXIT_USAGE

    try:
        results, passed = COMMANDS[config.command](config, inputs)
        envelope = build_envelope(config.command, config.model_dump(mode="json"), results, passed)
        text = emit_report(envelope, config.json_path)
        if args.store:
            ReportStore(args.store).save(_report_name(config), envelope)
    except GapkitError as e:
        logger.error(f"{config.command} failed: {e}")
        return EXIT_FAIL

    if config.json_path is None:
        sys.stdout.write(text)
    return EXIT_PASS if passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())

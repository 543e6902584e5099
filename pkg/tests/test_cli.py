import json

import pytest

from gapkit.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, build_parser, main
from gapkit.config import RunConfig, load_run_config
from gapkit.errors import GapkitError, ReportError, SetSpecError
from gapkit.reports import SCHEMA, ReportStore, build_envelope, emit_report, parse_report, render_report
from gapkit.verify import run_verify


def test_schema_command(capsys):
    assert main(["schema"]) == EXIT_PASS
    schema = json.loads(capsys.readouterr().out)
    assert "schema" in schema["properties"]


def test_density_report_on_stdout(capsys):
    assert main(["density", "--set", "lattice:alpha=1", "--radius", "1000"]) == EXIT_PASS
    envelope = parse_report(capsys.readouterr().out)
    assert envelope.schema_version == SCHEMA
    assert envelope.command == "density"
    upper = envelope.results["density"]["upper"]
    assert upper["bracket"][0] <= 1.0 <= upper["bracket"][1]


def test_same_config_gives_identical_bytes(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["density", "--set", "lattice-minus:alpha=1,residues=0 mod 3", "--radius", "500"]
    assert main(args + ["--json", str(first)]) == EXIT_PASS
    assert main(args + ["--json", str(second)]) == EXIT_PASS
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    a["config"].pop("json_path")
    b["config"].pop("json_path")
    assert a == b
    assert main(args + ["--json", str(first)]) == EXIT_PASS
    assert first.read_text() == render_report(parse_report(first.read_text()))


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--set", "lattice:alpha=-1"],
        ["density"],
        ["gaptest", "--b", "1.0"],
        ["density", "--set", "lattice:alpha=1", "--window", "2"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_unknown_suite_is_rejected_by_the_parser():
    with pytest.raises(SystemExit) as info:
        main(["verify", "prop99"])
    assert info.value.code == 2


def test_missing_measure_file(tmp_path):
    assert main(["gaptest", "--measure", str(tmp_path / "none.measure"), "--b", "1"]) == EXIT_USAGE


def test_witness_then_gaptest(tmp_path, capsys):
    witness, scan, trace = tmp_path / "w.measure", tmp_path / "scan.csv", tmp_path / "trace.csv"
    code = main(["gap", "--set", "lattice:alpha=1", "--window", "64", "--witness", str(witness), "--csv", str(scan)])
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert scan.read_text().splitlines()[0] == "x,abs_ft"
    capsys.readouterr()

    assert main(["gaptest", "--measure", str(witness), "--b", "1.5", "--csv", str(trace)]) == EXIT_PASS
    envelope = parse_report(capsys.readouterr().out)
    assert envelope.results["decay"]["verdict"] == "decaying"
    assert trace.read_text().splitlines()[0] == "y,trace"

    assert main(["gaptest", "--measure", str(witness), "--b", "3.0"]) == EXIT_FAIL


def test_pipeline_errors_exit_with_failure(tmp_path):
    code = main(["transport", "--set", "lattice:alpha=1", "--window", "16", "--delta", "0.2"])
    assert code == EXIT_FAIL


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"command": "density", "set_spec": "lattice:alpha=2", "radius": 300}))
    merged = load_run_config(str(config), {"radius": 400.0, "seed": None})
    assert merged.set_spec == "lattice:alpha=2"
    assert merged.radius == 400.0
    assert merged.seed == 0


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(GapkitError):
        load_run_config(str(bad), {})
    with pytest.raises(GapkitError):
        load_run_config(None, {"command": "density", "radius": -1})


def test_run_config_is_frozen():
    config = RunConfig(command="verify", suite="prop21")
    with pytest.raises(Exception):
        config.seed = 3


def test_suite_errors_keep_the_parse_position():
    config = RunConfig(command="verify", suite="prop21", set_spec="lattice:alpha=-1")
    with pytest.raises(SetSpecError) as info:
        run_verify("prop21", config)
    message = str(info.value)
    assert message.startswith("[prop21] ")
    assert message.count("at position") == 1
    assert info.value.position > len("lattice:")
    assert info.value.expected == "a positive number"


def test_parser_maps_flags_to_config_keys():
    args = build_parser().parse_args(["transport", "--base", "lattice:alpha=1", "--gap", "2", "--witness", "out"])
    assert args.set_spec == "lattice:alpha=1"
    assert args.gap == 2.0
    assert args.witness_path == "out"


def test_report_store(tmp_path):
    store = ReportStore(tmp_path / "reports")
    envelope = build_envelope("density", {"radius": 10.0}, {"value": 1.5}, passed=True)
    path = store.save("density", envelope)
    assert path.exists()
    assert store.load("density") == envelope
    assert store.names() == ["density"]
    (tmp_path / "reports" / "broken.json").write_text("{not json")
    assert store.load("broken") is None
    assert store.load("missing") is None


def test_unwritable_report_path(tmp_path):
    envelope = build_envelope("density", {}, {})
    with pytest.raises(ReportError):
        emit_report(envelope, tmp_path / "no" / "such" / "dir" / "r.json")


def test_store_flag(tmp_path):
    store = tmp_path / "store"
    assert main(["density", "--set", "explicit:0,0.3,1.0", "--store", str(store)]) == EXIT_PASS
    assert ReportStore(store).names() == ["density"]


def test_verify_lemma51(tmp_path):
    out = tmp_path / "lemma51.json"
    assert main(["verify", "lemma51", "--json", str(out)]) == EXIT_PASS
    envelope = parse_report(out.read_text())
    suite = envelope.results["suites"][0]
    assert suite["suite"] == "lemma51"
    assert len(suite["checks"]) == 20
    assert envelope.passed


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["prop21", "prop22", "prop23", "prop24", "theorem_gap"])
def test_verify_suites(suite, tmp_path):
    first, second = tmp_path / "1.json", tmp_path / "2.json"
    assert main(["verify", suite, "--json", str(first)]) == EXIT_PASS
    assert main(["verify", suite, "--json", str(first)]) == EXIT_PASS
    assert main(["verify", suite, "--json", str(second)]) == EXIT_PASS
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    a["config"].pop("json_path")
    b["config"].pop("json_path")
    assert a == b

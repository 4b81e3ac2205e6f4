import io
import json
import re
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import lattice
from wcyclic.catalogue import DEFAULT_CATALOGUE
from wcyclic.cli import EXIT_CAPACITY, EXIT_PARSE, main
from wcyclic.config import Config
from wcyclic.errors import ParseError
from wcyclic.export import export, lattice_to_dot, normalize, to_json
from wcyclic.perm import Permutation


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text)


# export ---------------------------------------------------------------------------

def test_empty_report_list():
    assert export([], "json") == b"[]\n"
    assert to_json([]) == "[]"


def test_normalize_rules():
    assert normalize(-0.0) == 0.0 and str(normalize(-0.0)) == "0.0"
    assert normalize(1 / 3) == 0.333333333333
    assert normalize(np.float64(2.5)) == 2.5
    assert normalize(complex(1, -0.0)) == [1.0, 0.0]
    assert normalize(np.array([1, 2])) == [1, 2]
    assert normalize(np.bool_(True)) is True
    assert normalize(float("inf")) == "inf"
    assert normalize({1: (2,)}) == {"1": [2]}
    with pytest.raises(TypeError):
        normalize(object())


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_normalize_is_idempotent(x):
    once = normalize(x)
    assert normalize(once) == once
    if x != 0:
        assert abs(once - x) <= 1e-11 * abs(x)


def test_json_keys_sorted():
    assert to_json({"b": 1, "a": 2}).index('"a"') < to_json({"b": 1, "a": 2}).index('"b"')


def test_dot_for_z6():
    dot = lattice_to_dot(lattice("Z6"), "Z6")
    assert len(re.findall(r"^\s+n\d+ \[label", dot, re.M)) == 4
    assert len(re.findall(r"->", dot)) == 4
    assert export(lattice("Z6"), "dot").decode() == dot


def test_export_errors():
    with pytest.raises(ValueError):
        export([], "yaml")
    with pytest.raises(ValueError):
        export([], "dot")


# config -----------------------------------------------------------------------------

def test_config_defaults_and_validation():
    cfg = Config()
    assert cfg.eigen_tol == 1e-8 and cfg.seed == 0 and cfg.samples == 32
    for bad in ({"eigen_tol": 0}, {"projection_tol": -1.0}, {"max_order": 0}, {"jobs": 0},
                {"output_format": "xml"}):
        with pytest.raises(ParseError):
            Config(**bad)


def test_config_environment_overrides():
    env = {"WCYCLIC_SEED": "7", "WCYCLIC_EIGEN_TOL": "1e-9", "WCYCLIC_OUTPUT_FORMAT": "json"}
    cfg = Config.from_env(env)
    assert cfg.seed == 7 and cfg.eigen_tol == 1e-9 and cfg.output_format == "json"
    assert Config.from_env(env, seed=3, jobs=None).seed == 3
    with pytest.raises(ParseError):
        Config.from_env({"WCYCLIC_JOBS": "many"})


def test_environment_reaches_cli(monkeypatch):
    monkeypatch.setenv("WCYCLIC_OUTPUT_FORMAT", "json")
    code, text = run("catalogue", "--list")
    assert code == 0 and isinstance(json.loads(text), list)
    monkeypatch.setenv("WCYCLIC_MAX_ORDER", "10")
    assert run("lattice", "S4")[0] == EXIT_CAPACITY


# subcommands ----------------------------------------------------------------------------

def test_lattice_command():
    code, data = run_json("lattice", "Z1")
    assert code == 0 and len(data["subgroups"]) == 1
    code, data = run_json("lattice", "S3")
    assert data["order"] == 6 and len(data["subgroups"]) == 6
    assert data["profile"]["distributive"] is False
    code, text = run("lattice", "Z6", "--format", "dot")
    assert code == 0 and text.count("->") == 4
    code, text = run("lattice", "S3")
    assert code == 0 and "6 subgroups" in text


def test_interval_counterexample_text():
    code, text = run("interval", "S4", "(0 1)")
    assert code == 0
    first = text.splitlines()[0]
    assert "not top Boolean" in first and "H-cyclic witness (0 1 2 3)" in first


def test_interval_json_and_high():
    code, data = run_json("interval", "S4", "(0 1)")
    assert data["profile"]["top_boolean"] is False
    assert data["h_cyclic_witness"] == "(0 1 2 3)"
    code, data = run_json("interval", "Z6", "()", "--high", "(0 1 2 3 4 5)")
    assert code == 0 and data["profile"]["boolean"] and data["size"] == 4
    assert run("interval", "S3", "(0 1 2)", "--high", "(0 1)")[0] == EXIT_PARSE
    assert run("interval", "S3", "(0 5)")[0] == EXIT_PARSE


def test_chain_command():
    code, data = run_json("chain", "S3", "--mode", "top")
    assert code == 0 and data["length"] == 2
    code, data = run_json("chain", "Q8", "--mode", "bottom")
    assert data["length"] == 1
    code, data = run_json("chain", "S4", "--mode", "bottom", "--core-free")
    assert code == 0 and data["core_free"] is True
    assert run("chain", "S4", "--core-free")[0] == EXIT_PARSE


def test_chartable_command():
    code, data = run_json("chartable", "S3")
    assert code == 0
    assert len(data["classes"]) == 3 and data["degrees"] == [1, 1, 2]
    assert data["tolerances"] == {"eigen": 1e-8, "round": 1e-6}
    assert data["orthogonality_residual"] < 1e-8


def test_fusion_command():
    code, data = run_json("fusion", "S3")
    assert code == 0 and data["n"][2][2] == [1, 1, 1]
    code, text = run("fusion", "Z2")
    assert code == 0


def test_twobox_demo():
    code, data = run_json("twobox", "S3", "--demo")
    assert code == 0
    code, text = run("twobox", "Q8", "--demo")
    assert code == 0 and "delta" in text


def test_catalogue_listing():
    code, data = run_json("catalogue", "--list")
    assert [r["name"] for r in data] == list(DEFAULT_CATALOGUE)
    assert all(r["order"] <= 60 for r in data)


def test_verify_command():
    code, data = run_json("verify", "S3", "--suite", "fusion", "--suite", "bounds")
    assert code == 0 and {r["suite"] for r in data} == {"fusion", "bounds"}
    assert all(r["ms"] is None for r in data)
    code, text = run("verify", "Z2")
    assert code == 0 and "all suites passed" in text
    code, data = run_json("verify", "S3", "--suite", "fusion", "--timings")
    assert data[0]["ms"] is not None


def test_verify_is_byte_identical():
    assert run("verify", "D4", "--json", "--seed", "3") == run("verify", "D4", "--json", "--seed", "3")


def test_verify_parallel_matches_serial():
    args = ["verify", "--catalogue", "--suite", "chartable", "--json"]
    assert run(*args, "--jobs", "2") == run(*args)


def test_verify_argument_errors():
    assert run("verify")[0] == EXIT_PARSE
    assert run("verify", "S3", "--catalogue")[0] == EXIT_PARSE


def test_dot_rejected_outside_lattice():
    assert run("chartable", "S3", "--format", "dot")[0] == EXIT_PARSE


# exit codes ---------------------------------------------------------------------------------

@pytest.mark.parametrize("argv, code", [
    (["lattice", "Q4"], EXIT_PARSE),
    (["lattice", "(0 1"], EXIT_PARSE),
    (["lattice", "S6", "--max-order", "100"], EXIT_CAPACITY),
    (["lattice", "S4", "--max-subgroups", "5"], EXIT_CAPACITY),
    (["chartable", "S3", "--tol-eigen", "-1"], EXIT_PARSE),
])
def test_error_exit_codes(argv, code):
    assert run(*argv)[0] == code


def test_unknown_subcommand_exits_64():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_PARSE


def test_integrity_error_exit_code(monkeypatch):
    from wcyclic import cli
    from wcyclic.errors import IntegrityError

    def broken(*_, **__):
        raise IntegrityError("forced")

    monkeypatch.setattr(cli, "character_table", broken)
    assert run("chartable", "S3")[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wcyclic.cli", "lattice", "Z1", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and len(json.loads(proc.stdout)["subgroups"]) == 1
    proc = subprocess.run([sys.executable, "-m", "wcyclic.cli", "bogus"], capture_output=True, check=False)
    assert proc.returncode == EXIT_PARSE


def test_generator_list_descriptor():
    code, data = run_json("lattice", "(0 1 2 3),(0 1)")
    assert data["order"] == 24 and len(data["subgroups"]) == 30
    assert Permutation.parse("(0 1 2 3)").order() == 4

import io
import json
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from hwy1 import schemas
from hwy1.cli import run
from hwy1.graph import format_graph
from hwy1.oracles import gen_corpus

STAR = "p graph 5 4\ne 0 1 3\ne 0 2 3\ne 0 3 3\ne 0 4 3\nt 1\nt 3\n"
SQUARE = "p graph 4 4\ne 0 1 3\ne 1 2 3\ne 2 3 3\ne 0 3 3\nt 0\nt 2\n"
PHI_X = "p cnf 1 1\n1 0\n"
XYZ = "p cnf 3 1\n1 2 3 0\n"
UNSAT = "p cnf 1 2\n1 0\n-1 0\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "star.graph": STAR,
        "square.graph": SQUARE,
        "phi.cnf": PHI_X,
        "xyz.cnf": XYZ,
        "unsat.cnf": UNSAT,
        "bad.graph": "p graph 2 1\ne 0 1 -3\n",
        "bad.cnf": "p cnf 1 1\n5 0\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name.split(".")[0]] = p
    items, _ = gen_corpus(1, 12, 12)
    p = tmp_path / "inst.graph"
    p.write_text(format_graph(items[0][1]))
    paths["inst"] = p
    return paths


GRAPH_COMMANDS = [
    ("verify-hd1", ()),
    ("spc", ("--r", "3")),
    ("hierarchy", ()),
    ("net", ("--r", "3")),
    ("treedecomp", ()),
    ("solve-tsp", ()),
    ("solve-steiner", ()),
    ("fptas-tsp", ("--eps", "1/10")),
    ("fptas-steiner", ("--eps", "1/2")),
    ("oracle-tsp", ()),
    ("oracle-steiner", ()),
    ("oracle-hd", ()),
]


@pytest.mark.parametrize("command,extra", GRAPH_COMMANDS)
def test_graph_commands_validate(files, command, extra):
    code, out, _ = call(command, files["star"], "--json", *extra)
    assert code == 0
    jsonschema.validate(json.loads(out), schemas.BY_COMMAND[command])


@pytest.mark.parametrize("command", ["gen-stp", "gen-tsp", "decide-stp", "decide-tsp"])
def test_formula_commands_validate(files, command):
    code, out, _ = call(command, files["xyz"], "--json")
    assert code == 0
    jsonschema.validate(json.loads(out), schemas.BY_COMMAND[command])


def test_gen_corpus(tmp_path):
    out_dir = tmp_path / "corpus"
    code, out, _ = call("gen-corpus", "--count", 3, "--seed", 5, "--out", out_dir, "--json")
    assert code == 0
    manifest = json.loads(out)
    jsonschema.validate(manifest, schemas.MANIFEST)
    assert json.loads((out_dir / "manifest.json").read_text()) == manifest
    for entry in manifest:
        assert (out_dir / entry["file"]).exists()


def test_verify_star_certificate(files):
    code, out, _ = call("verify-hd1", files["star"], "--json")
    data = json.loads(out)
    assert code == 0 and data["result"] == "certificate"
    assert {"r": "3/1", "hubs": {"0": 0}} in data["certificate"]["scales"]


def test_verify_square_witness(files):
    code, out, _ = call("verify-hd1", files["square"], "--json")
    data = json.loads(out)
    assert code == 1 and data["result"] == "witness" and data["witness_checked"]
    jsonschema.validate(data, schemas.VERIFY)


def test_gen_stp_then_oracle(files, tmp_path):
    target = tmp_path / "g.graph"
    assert call("gen-stp", files["phi"], "--out", target)[0] == 0
    side = json.loads((tmp_path / "g.graph.json").read_text())
    assert side["threshold"] == "133"
    code, out, _ = call("oracle-steiner", target, "--json")
    assert code == 0 and json.loads(out)["cost"] == "133"


def test_fptas_ratio_against_oracle(files, tmp_path):
    trace = tmp_path / "trace.json"
    _, out, _ = call("fptas-tsp", files["inst"], "--eps", "1/10", "--trace", trace, "--json")
    approx = Fraction(json.loads(out)["solution"]["cost"])
    _, out, _ = call("oracle-tsp", files["inst"], "--json")
    opt = Fraction(json.loads(out)["cost"])
    assert approx <= Fraction(11, 10) * opt
    jsonschema.validate(json.loads(trace.read_text()), schemas.REPORT)


@pytest.mark.parametrize("solve,oracle,extra", [
    ("solve-tsp", "oracle-tsp", ()),
    ("solve-steiner", "oracle-steiner", ("--terminals", "0,1,2")),
])
def test_solvers_agree_with_oracles(files, solve, oracle, extra):
    a = json.loads(call(solve, files["inst"], "--json", *extra)[1])
    b = json.loads(call(oracle, files["inst"], "--json", *extra)[1])
    assert a["cost"] == b["cost"]


def test_uncertified_graph_falls_back_to_heuristic(files):
    code, out, _ = call("solve-tsp", files["square"], "--json")
    data = json.loads(out)
    assert code == 0 and data["cost"] == "12" and "min-fill-in" in data["solver"]


class TestExitCodes:
    def test_missing_file(self, tmp_path):
        assert call("verify-hd1", tmp_path / "nope.graph")[0] == 2

    def test_malformed_graph(self, files):
        assert call("verify-hd1", files["bad"])[0] == 2

    def test_malformed_cnf(self, files):
        assert call("gen-stp", files["bad"])[0] == 2

    def test_bad_eps(self, files):
        assert call("fptas-tsp", files["star"], "--eps", "0")[0] == 2
        assert call("fptas-tsp", files["star"], "--eps", "abc")[0] == 2

    def test_unknown_command(self):
        assert call("frobnicate")[0] == 2

    def test_missing_radius(self, files):
        assert call("spc", files["star"])[0] == 2

    def test_uncertified_fptas(self, files):
        assert call("fptas-tsp", files["square"])[0] == 1

    def test_unsat_decision(self, files):
        code, out, _ = call("decide-stp", files["unsat"], "--json")
        assert code == 1 and json.loads(out)["satisfiable"] is False

    def test_not_33_formula(self, files, tmp_path):
        p = tmp_path / "many.cnf"
        p.write_text("p cnf 1 3\n1 0\n1 0\n1 0\n")
        assert call("gen-tsp", p)[0] == 2

    def test_width_budget_is_internal(self, files):
        assert call("solve-tsp", files["inst"], "--max-bag", "1")[0] == 3

    def test_disconnected_is_negative(self, tmp_path):
        p = tmp_path / "split.graph"
        p.write_text("p graph 3 1\ne 0 1 2\n")
        assert call("verify-hd1", p)[0] == 1


def test_decide_tsp_sat(files):
    code, out, _ = call("decide-tsp", files["xyz"], "--json")
    data = json.loads(out)
    assert code == 0 and data["satisfiable"] and any(data["assignment"])


def test_fraction_weights_reported_exactly(tmp_path):
    p = tmp_path / "half.graph"
    p.write_text("p graph 3 2\ne 0 1 1/2\ne 1 2 1/3\n")
    _, out, _ = call("oracle-tsp", p, "--json")
    assert json.loads(out)["cost"] == "5/3"


@pytest.mark.parametrize("argv", [
    ("fptas-steiner", "inst", "--eps", "1/2", "--terminals", "0,2,4"),
    ("hierarchy", "inst"),
    ("decide-tsp", "xyz", "--solver", "dp"),
])
def test_deterministic_output(files, argv):
    args = [files.get(a, a) for a in argv]
    first = call(*args, "--json")
    assert first == call(*args, "--json")
    assert first == call(*args, "--json", "--threads", "4")


def test_console_entry_point(files):
    cmd = [sys.executable, "-m", "hwy1.cli", "verify-hd1", str(files["star"])]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout and "certified" in a.stdout

"""Bundled instances with frozen optima, and file formats checked against the JSON schemas."""

import csv
import json
import math
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")

from boxpierce import io
from boxpierce.cli import BENCH_FIELDS, main
from boxpierce.generators import update_script
from boxpierce.geom import exact_piercing

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = sorted((ROOT / "tests" / "fixtures").glob("*.json"))
SCHEMAS = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (ROOT / "schemas").glob("*.json")}

ALGOS = {1: ["greedy1d", "dnc", "basic-mwu", "improved-mwu", "multiround:2", "exact"],
         2: ["dnc", "basic-mwu", "improved-mwu", "multiround:2", "two-round-2d", "exact"],
         3: ["dnc", "basic-mwu", "improved-mwu", "multiround:2", "exact"]}


def validate(obj, name):
    jsonschema.validate(obj, SCHEMAS[name])


def test_fixtures_present():
    assert {p.stem for p in FIXTURES} >= {"intervals_1d", "rects_2d", "boxes_3d", "planted_2d"}


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.stem)
def test_fixture_schema_and_optimum(path):
    obj = json.loads(path.read_text())
    validate(obj, "instance")
    inst = io.read_instance(path)
    assert exact_piercing(inst).size == obj["metadata"]["p_star"]


def _cases():
    for path in FIXTURES:
        d = json.loads(path.read_text())["dimension"]
        for algo in ALGOS[d]:
            yield pytest.param(path, algo, id=f"{path.stem}-{algo}")


@pytest.mark.parametrize("path,algo", list(_cases()))
def test_cli_smoke_on_fixture(path, algo, tmp_path, capsys):
    out = tmp_path / "sol.json"
    code = main(["solve", str(path), "--algo", algo, "--seed", "2", "--out", str(out)])
    rep = json.loads(capsys.readouterr().out)
    assert code == 0
    validate(json.loads(out.read_text()), "solution")
    p = rep["optimal"]
    assert rep["size"] >= p
    if algo in ("greedy1d", "exact"):
        assert rep["size"] == p
    else:
        assert rep["size"] <= 8 * p * max(1.0, math.log2(math.log2(p + 4)))
    assert main(["verify", str(path), str(out)]) == 0


def test_script_lines_match_schema():
    text = io.script_lines(update_script(30, 20, seed=1))
    for line in text.splitlines():
        validate(json.loads(line), "script-line")


def test_bench_columns_follow_schema(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "--n", "12", "--algo", "dnc", "--kind", "planted-piercing", "--out", str(out)]) == 0
    assert BENCH_FIELDS == SCHEMAS["bench"]["x-column-order"]
    with out.open() as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == BENCH_FIELDS
        rows = list(reader)
    ints = {k for k, v in SCHEMAS["bench"]["properties"].items() if "integer" in v["type"]}
    for r in rows:
        row = {k: (None if v == "" else int(v) if k in ints else float(v) if k in ("ratio", "wall_time") else v)
               for k, v in r.items()}
        validate(row, "bench")


def test_bench_sizes_deterministic(tmp_path, capsys):
    argv = ["bench", "--n", "30", "60", "--d", "2", "--algo", "dnc", "improved-mwu", "--seeds", "0", "1"]

    def sizes():
        assert main(argv) == 0
        return [r["size"] for r in csv.DictReader(capsys.readouterr().out.splitlines())]

    assert sizes() == sizes()

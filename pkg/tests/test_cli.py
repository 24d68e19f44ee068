import csv
import io
import json
import math

import jsonschema
import pytest

from infentropy import cli
from infentropy.reports import REPORT_SCHEMA


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_tent_vertices(capsys):
    code, out = run(capsys, "sample-graph", "--family", "tent", "--b", "3", "--samples", "7")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["x"]) for r in rows] == pytest.approx([k / 6 for k in range(7)], abs=1e-15)
    assert [float(r["fx"]) for r in rows] == pytest.approx([0, .5, 1, .5, 0, .5, 1], abs=1e-15)


def test_fa_graph_in_unit_square_and_fixes_dyadics(capsys):
    code, out = run(capsys, "sample-graph", "--family", "fa", "--a", "1", "--samples", "4097")
    assert code == 0
    rows = [(float(r["x"]), float(r["fx"])) for r in csv.DictReader(io.StringIO(out))]
    assert all(0 <= x <= 1 and 0 <= y <= 1 for x, y in rows)
    fixed = {x: y for x, y in rows if x > 0 and math.frexp(x)[0] == 0.5}
    assert len(fixed) >= 9 and all(x == y for x, y in fixed.items())


def test_svg_output(tmp_path):
    out = tmp_path / "z.svg"
    assert cli.main(["sample-graph", "--family", "zygmund", "--samples", "513", "--format", "svg",
                     "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg") and "<polyline" in text


@pytest.mark.parametrize("args", [["--family", "fa", "--a", "1"],
                                  ["--family", "fa", "--a", "0.5", "--p", "2", "--p", "1.5"],
                                  ["--family", "tent", "--b", "3"],
                                  ["--family", "gab", "--a", "0.5", "--b", "4"],
                                  ["--family", "zygmund"]], ids=lambda a: "-".join(a[1::2]))
def test_verify_families(capsys, args):
    code, out = run(capsys, "verify", *args, "--samples", "5000")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert code == 0 and doc["overall"] == "pass"


def test_verify_reports_expected_divergence(capsys):
    _, out = run(capsys, "verify", "--family", "fa", "--a", "0.5", "--p", "2", "--suite", "regularity",
                 "--samples", "5000")
    doc = json.loads(out)
    sob = [r for r in doc["reports"] if r.get("functional") == "sobolev"]
    assert sob[0]["verdict"] == "diverged" and sob[0]["ok"]


def test_verify_f1_sobolev_value(capsys):
    _, out = run(capsys, "verify", "--family", "fa", "--a", "1", "--suite", "regularity",
                 "--samples", "5000")
    sob = [r for r in json.loads(out)["reports"] if r.get("functional") == "sobolev"]
    assert sob[0]["empirical"] == pytest.approx(5.0, abs=1e-9)


def test_verify_zygmund_entropy_rows(capsys):
    _, out = run(capsys, "verify", "--family", "zygmund", "--suite", "entropy")
    rows = [r for r in json.loads(out)["reports"] if r["kind"] == "entropy"]
    assert [r["lower_bound_nats"] for r in rows] == \
        pytest.approx([0.5 * math.log(2 * n) for n in range(1, 9)])


def test_entropy_sweep(capsys):
    _, out = run(capsys, "entropy-sweep", "--family", "fa", "--a", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[-1]["lower_bound_nats"]) == pytest.approx(math.log(17))
    lbs = [float(r["lower_bound_nats"]) for r in rows]
    assert lbs == sorted(lbs)
    _, out = run(capsys, "entropy-sweep", "--family", "zygmund")
    assert float(list(csv.DictReader(io.StringIO(out)))[-1]["lower_bound_nats"]) == \
        pytest.approx(0.5 * math.log(16))
    _, out = run(capsys, "entropy-sweep", "--family", "tent", "--b", "3")
    assert float(list(csv.DictReader(io.StringIO(out)))[-1]["lower_bound_nats"]) == \
        pytest.approx(math.log(3))


def test_entropy_sweep_resource_exit(capsys):
    # the branch cap is hit long before block 10**6
    assert cli.main(["entropy-sweep", "--family", "fa", "--a", "1", "--nmax", "3"]) == 0
    capsys.readouterr()


def test_deterministic_output(capsys):
    argv = ["verify", "--family", "gab", "--a", "0.5", "--b", "3", "--samples", "3000", "--seed", "4"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a == b


@pytest.mark.parametrize("argv", [["verify", "--family", "fa", "--a", "2"],
                                  ["verify", "--family", "fa"],
                                  ["verify", "--family", "tent"],
                                  ["sample-graph", "--family", "tent", "--b", "3", "--samples", "1"],
                                  ["frobnicate"],
                                  ["verify", "--family", "nope"]])
def test_usage_errors(capsys, argv):
    assert cli.main(argv) == cli.EXIT_USAGE
    capsys.readouterr()


def test_unwritable_path(capsys):
    code = cli.main(["sample-graph", "--family", "tent", "--b", "2", "--out", "/nonexistent/dir/x.csv"])
    assert code == cli.EXIT_USAGE
    capsys.readouterr()

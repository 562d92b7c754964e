import io
import json
from pathlib import Path

import pytest

from wlpa.cli import run

DATA = Path(__file__).parent / "data"


def call(*args):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in args], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def data(name):
    return DATA / name


def test_check_text():
    code, out, _ = call("check", data("g4.wg"))
    assert code == 0
    assert "LPA: yes" in out and "LV: no" in out


def test_gkdim_infinity():
    assert call("gkdim", data("g8.wg"))[1].strip() == "infinity"
    code, out, _ = call("gkdim", data("g8.wg"), "--format", "json")
    assert json.loads(out) == {"gk_dimension": {"infinite": True}}
    assert call("gkdim", data("g2.wg"))[1].strip() == "2"


def test_classify_json():
    code, out, _ = call("classify", data("g4.wg"), "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert sorted(d["matrix_sizes"]) == [3, 3]


def test_normal_form_and_product():
    assert call("nf", data("g4.wg"), "-e", "f_1*f_1^*")[1].strip() == "v - e_1*e_1^*"
    code, out, _ = call("nf", data("g4.wg"), "-e", "f_1*f_1^*", "--format", "json")
    assert json.loads(out) == {"normal_form": "v - e_1*e_1^*"}
    assert call("mul", data("g8.wg"), "-e", "e_1", "-e", "e_1^*")[1].strip() == "v - f_1*f_1^*"


def test_prime_field():
    code, out, _ = call("nf", data("g8.wg"), "-e", "5*e_1 + 2*v", "--field", "p", "--prime", "5")
    assert code == 0
    assert out.strip() == "2*v"


def test_count_paths_and_quasicycles():
    assert call("count-paths", data("g4.wg"))[1].strip() == "18"
    assert call("quasicycles", data("g2.wg"))[1].split() == ["e_2*f_1*g_1^*", "g_1*f_1^**e_2^*"]


def test_valuation():
    assert call("valuation", data("g8.wg"), "-e", "e_1 + v")[1].strip() == "1"
    assert call("valuation", data("g8.wg"), "-e", "0")[1].strip() == "-infinity"
    assert json.loads(call("valuation", data("g8.wg"), "-e", "0", "--format", "json")[1]) == {"valuation": None}
    assert call("valuation", data("g4.wg"), "-e", "v")[0] == 1


def test_transform():
    code, out, _ = call("transform", data("g4.wg"))
    assert code == 0
    assert "vertex x__1" in out
    code, _, err = call("transform", data("g1.wg"))
    assert code == 1
    assert "LPA2" in err


def test_ktheory_commands():
    assert call("k0", data("g4.wg"))[1].strip() == "Z^2"
    assert json.loads(call("k0", data("g4.wg"), "--format", "json")[1]) == {"rank": 2, "torsion": []}
    assert call("monoid", data("g5.wg"))[1].strip() == "<v, u, x | 2v = u + x>"
    code, out, _ = call("graded-k0", data("g5.wg"), "--window", "-1:1,-1:1")
    assert code == 0 and len(out.strip().splitlines()) == 9
    assert "v - e_1*e_1^*" in call("theta", data("g4.wg"))[1]
    assert call("corner", data("g8.wg"))[0] == 0
    assert call("corner", data("g4.wg"))[0] == 1


def test_weightmap_commands(tmp_path):
    assert call("weightmap", "standard", data("g5.wg"))[0] == 0
    good = tmp_path / "w.json"
    good.write_text(json.dumps({"e_1": [1, 0], "e_2": [0, 1], "f_1": [1, 0], "f_2": [0, 1]}))
    assert call("weightmap", "validate", data("g5.wg"), "--weightmap", good)[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"e_1": [1, 0], "e_2": [5, 5], "f_1": [1, 0], "f_2": [0, 1]}))
    code, out, _ = call("weightmap", "validate", data("g5.wg"), "--weightmap", bad)
    assert code == 0
    assert out.strip() == "not admissible at f_2"


def test_rep_commands():
    base = ("--base", data("g8.wg"))
    assert call("rep", "validate", data("f5.rg"), *base)[1].strip() == "valid"
    code, out, _ = call("rep", "equiv", data("f5.rg"), *base, "--format", "json")
    assert json.loads(out) == {"classes": [["a", "b"]]}
    assert call("rep", "act", data("f5.rg"), *base, "--vertex", "a", "-e", "e_1")[1].strip() == "b"
    code, out, _ = call("rep", "unfold", data("f7.rg"), *base, "--vertex", "a", "--format", "json")
    assert len(json.loads(out)["vertices"]) == 17
    assert call("rep", "irreducible", data("f7.rg"), *base)[1].startswith("irreducible")


@pytest.mark.parametrize(
    "args",
    [
        ("nf", "g4.wg", "-e", "e_1*("),
        ("check", "missing.wg"),
        ("nf", "g4.wg", "-e", "q_1"),
    ],
)
def test_input_errors_exit_2(args):
    code, _, err = call(*[data(a) if a.endswith(".wg") else a for a in args])
    assert code == 2
    assert err.startswith("error:")


def test_bad_graph_file_exits_2(tmp_path):
    p = tmp_path / "bad.wg"
    p.write_text("vertex v\nedge e v w 1\n")
    assert call("check", p)[0] == 2


def test_text_and_json_agree():
    for cmd in ("gkdim", "k0"):
        for name in ("g2.wg", "g4.wg", "g5.wg"):
            code1, text, _ = call(cmd, data(name))
            code2, js, _ = call(cmd, data(name), "--format", "json")
            assert code1 == code2 == 0
            assert text.strip() and json.loads(js)

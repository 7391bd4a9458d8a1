import io
import json

import pytest

from s5lift.actions import canonical_action
from s5lift.cli import run
from s5lift.frames import FiniteFrame, PMorphism
from s5lift.presheaves import TruncatedPresheaf
from s5lift.theory import model_from_frame


def call(argv, payload=None, monkeypatch=None, capsys=None):
    if payload is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(payload)))
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def cli(monkeypatch, capsys):
    def go(*argv, payload=None):
        return call(list(argv), payload, monkeypatch, capsys)
    return go


class TestSurj:
    def test_enumerate(self, cli):
        code, out = cli("surj", "enumerate", "--n", "3", "--m", "2")
        assert code == 0 and len(out) == 6
        assert out[0] == {"dom": 3, "cod": 2, "map": [1, 1, 2]}

    def test_enumerate_needs_sizes(self, cli):
        code, out = cli("surj", "enumerate", "--n", "3")
        assert code == 2 and out["error"] == "usage"

    def test_coeq(self, cli):
        code, out = cli("surj", "coeq", payload={"f": [1, 2, 2], "g": [2, 1, 1]})
        assert code == 0 and out["map"] == [1, 1]

    def test_pushout(self, cli):
        code, out = cli("surj", "pushout", payload={"f": [1, 1, 2], "g": [1, 2, 2]})
        assert code == 0 and set(out) == {"f_push", "g_push"}
        assert out["f_push"]["cod"] == 1

    def test_not_parallel(self, cli):
        code, out = cli("surj", "coeq", payload={"f": [1, 2, 2], "g": [1, 2, 3]})
        assert code == 2 and "error" in out


class TestFramesAndAlgebras:
    def test_frame_coeq(self, cli):
        fr = FiniteFrame.cluster(3).to_json()
        f = PMorphism(FiniteFrame.cluster(3), FiniteFrame.cluster(3), (1, 2, 3)).to_json()
        g = PMorphism(FiniteFrame.cluster(3), FiniteFrame.cluster(3), (2, 1, 3)).to_json()
        code, out = cli("frame", "coeq", payload={"f": f, "g": g})
        assert code == 0
        assert FiniteFrame.from_json(out["quotient"]) == FiniteFrame.cluster(2)
        assert fr["blocks"] == [1, 1, 1]

    def test_dual_round_trip(self, cli):
        fr = FiniteFrame((1, 1, 2))
        code, alg = cli("frame", "dual", payload=fr.to_json())
        assert code == 0
        code, back = cli("algebra", "dual", payload=alg)
        assert code == 0 and FiniteFrame.from_json(back) == fr

    def test_algebra_check_fails(self, cli):
        code, out = cli("algebra", "check", payload={"atoms": 2, "box": [1, 1, 3, 3]})
        assert code == 1 and out["verdict"] == "fail"

    def test_coprod_and_signature(self, cli):
        code, out = cli("frame", "coprod", payload=[[1], [1, 1]])
        assert code == 0 and len(out["injections"]) == 2
        code, out = cli("frame", "signature", payload=out["coproduct"])
        assert code == 0 and out["signature"]


class TestActionsAndLifts:
    def test_validate(self, cli):
        code, out = cli("action", "validate", payload=canonical_action(3).to_json())
        assert code == 0 and out["verdict"] == "pass"

    def test_validate_fails(self, cli):
        bad = {"m": 2, "carrier": 3, "gen_swap": [2, 3, 1], "gen_cycle": [2, 3, 1]}
        code, out = cli("action", "validate", payload=bad)
        assert code == 1 and out["verdict"] == "fail"

    def test_decompose(self, cli):
        code, out = cli("action", "decompose", payload=canonical_action(2).to_json())
        assert code == 0 and out == [{"base": 1, "elements": [1, 2], "perm_of": {"1": 1, "2": 2}}]

    def test_build_and_verify(self, cli):
        a = canonical_action(2).to_json()
        code, L = cli("lift", "build", "--level", "3", payload=a)
        assert code == 0 and L["carriers"] == [0, 2, 6]
        code, rep = cli("lift", "verify", "--level", "3",
                        payload={"action": a, "presheaf": L, "unit": L["unit"]})
        assert code == 0 and rep["verdict"] == "pass"

    def test_homs(self, cli):
        X = model_from_frame([3], 4).to_json()
        Y = model_from_frame([2], 4).to_json()
        code, out = cli("lift", "homs", payload={"source": X, "target": Y})
        assert code == 0 and out["count"] == 6


class TestTheory:
    def test_check_t2_on_lifting(self, cli):
        code, out = cli("theory", "check-t2", payload=model_from_frame([2], 4).to_json())
        assert code == 0 and out["verdict"] == "pass"

    def test_all_elements_flag(self, cli):
        code, out = cli("theory", "check-t2", "--all-elements", payload=model_from_frame([2], 4).to_json())
        assert code == 1

    def test_classify(self, cli):
        code, out = cli("theory", "classify", payload=model_from_frame({1: 1, 2: 2}, 4).to_json())
        assert code == 0 and out["clusters"] == {"1": 1, "2": 2}

    def test_from_frame(self, cli):
        code, out = cli("theory", "from-frame", "--level", "3", payload={"2": 1})
        assert code == 0
        assert TruncatedPresheaf.from_json(out) == model_from_frame([2], 3)

    def test_from_frame_too_big(self, cli):
        code, out = cli("theory", "from-frame", "--level", "2", payload=[3])
        assert code == 2 and "error" in out

    def test_classify_non_model(self, cli):
        bad = {"m": 2, "carrier": 1, "gen_swap": [1], "gen_cycle": [1]}
        code, L = cli("lift", "build", "--level", "3", payload=bad)
        code, out = cli("theory", "classify", payload=L)
        assert code == 2 and "error" in out


class TestErrors:
    def test_unknown_command(self, cli):
        code, out = cli("nope")
        assert code == 2 and out["error"] == "usage"

    def test_not_json(self, cli, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("{"))
        code, out = cli("surj", "coeq")
        assert code == 2

    def test_missing_file(self, cli, tmp_path):
        code, out = cli("theory", "check-t1", "--input", str(tmp_path / "none.json"))
        assert code == 2 and out["error"] == "io"

    def test_output_file(self, tmp_path, capsys):
        dest = tmp_path / "out.json"
        assert run(["surj", "enumerate", "--n", "2", "--m", "2", "--output", str(dest)]) == 0
        assert len(json.loads(dest.read_text())) == 2


class TestSuite:
    def test_criterion_one_is_deterministic(self, cli):
        code1, out1 = cli("suite", "--criterion", "1", "--seed", "7")
        code2, out2 = cli("suite", "--criterion", "1", "--seed", "7")
        assert code1 == code2 == 0
        assert out1 == out2 and out1["verdict"] == "pass"

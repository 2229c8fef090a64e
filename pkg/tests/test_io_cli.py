import json

import numpy as np
import pytest

from sepwit import io
from sepwit.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from sepwit.linalg import DensityState, InvalidInputError, pauli
from sepwit.presets import operator_preset, state_preset
from sepwit.ranges import ProductPair

X, Z = pauli("X"), pauli("Z")
FAST = ["--angles", "180", "--restarts", "8"]


def _run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out), *FAST])
    return code, out


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


def test_matrix_round_trip():
    m = np.array([[1.0, 2 - 1j], [2 + 1j, -3.0]])
    back = io.matrix_from_json(json.loads(json.dumps(io.matrix_to_json(m))))
    assert np.array_equal(back, m)


def test_pair_and_state_round_trip(tmp_path):
    pair = operator_preset("planted-common")
    p = _write(tmp_path / "pair.json", io.to_jsonable(io.pair_to_json(pair)))
    back = io.load_pair_or_operators(p)
    assert all(np.array_equal(getattr(back, n), getattr(pair, n)) for n in ("A1", "A2", "B1", "B2"))
    st = state_preset("singlet")
    s = _write(tmp_path / "state.json", io.to_jsonable(io.state_to_json(st)))
    loaded = io.load_state(s)
    assert (loaded.dim_a, loaded.dim_b) == (2, 2)
    np.testing.assert_allclose(loaded.matrix, st.matrix, atol=0)


def test_operator_file(tmp_path):
    p = _write(tmp_path / "ops.json", {"H1": io.matrix_to_json(X), "H2": io.matrix_to_json(Z)})
    h1, h2 = io.load_pair_or_operators(p)
    assert np.array_equal(h1, X)


@pytest.mark.parametrize("obj", [
    {"H1": {"re": [[0, 1], [0, 0]]}, "H2": {"re": [[1, 0], [0, 1]]}},
    {"H1": {"re": [[1, 0], [0, 1]]}},
    {"A1": {"re": [1, 2]}, "A2": {"re": [1, 2]}, "B1": {"re": [1, 2]}, "B2": {"re": [1, 2]}},
    {"H1": {"re": [[1, "a"], [0, 1]]}, "H2": {"re": [[1, 0], [0, 1]]}},
])
def test_bad_operator_files(tmp_path, obj):
    p = _write(tmp_path / "bad.json", obj)
    with pytest.raises(InvalidInputError):
        io.load_pair_or_operators(p)
    code, _ = _run(tmp_path, "range", "--pair", str(p))
    assert code == EXIT_INPUT


def test_malformed_and_missing_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(tmp_path, "range", "--pair", str(bad))[0] == EXIT_INPUT
    assert _run(tmp_path, "range", "--pair", str(tmp_path / "nope.json"))[0] == EXIT_INPUT
    assert _run(tmp_path, "range", "--preset", "no-such-preset")[0] == EXIT_INPUT
    assert _run(tmp_path, "range", "--preset", "pauli-xz", "--angles", "3")[0] == EXIT_INPUT
    assert main(["bogus"]) == EXIT_INPUT


def test_non_state_rejected(tmp_path):
    bad = {"dimA": 2, "dimB": 2, "re": (-np.eye(4) / 4).tolist()}
    s = _write(tmp_path / "state.json", bad)
    with pytest.raises(InvalidInputError):
        io.load_state(s)
    assert _run(tmp_path, "detect", "--preset", "pauli-xxzz", "--state", str(s))[0] == EXIT_INPUT
    wrong = _write(tmp_path / "w.json", io.to_jsonable(io.state_to_json(DensityState.maximally_mixed(2, 3))))
    assert _run(tmp_path, "detect", "--preset", "pauli-xxzz", "--state", str(wrong))[0] == EXIT_INPUT


def test_range_pauli_square(tmp_path):
    code, out = _run(tmp_path, "range", "--preset", "pauli-xxzz", "--tangent=-1,-2", "--cloud", "50")
    assert code == EXIT_OK
    for name in ("joint.csv", "separable.csv", "cloud.csv", "range.svg", "range.json"):
        assert (out / name).exists()
    data = json.loads((out / "range.json").read_text())
    assert data["schema"] == io.SCHEMA
    (t,) = data["tangents"]
    # line -x - 2y = -2, i.e. x + 2y = 2, touching the inner square at (0, 1)
    assert t["side"] == "min" and t["value"] == pytest.approx(-2, abs=1e-6)
    svg = (out / "range.svg").read_text()
    assert svg.startswith("<svg") and "k=(-1,-2)" in svg
    rows = (out / "joint.csv").read_text().splitlines()
    assert rows[0] == "x,y" and len(rows) == 5


def test_range_two_operator_inputs(tmp_path):
    code, out = _run(tmp_path, "range", "--preset", "pauli-xz")
    assert code == EXIT_OK
    pts = np.loadtxt(out / "joint.csv", delimiter=",", skiprows=1)
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) < 1e-3
    h = np.diag([1.0, -2.0, 0.5])
    p = _write(tmp_path / "ops.json", {"H1": io.matrix_to_json(h), "H2": io.matrix_to_json(h)})
    code, out = _run(tmp_path, "range", "--pair", str(p))
    seg = np.loadtxt(out / "joint.csv", delimiter=",", skiprows=1)
    assert code == EXIT_OK and seg.shape == (2, 2)
    np.testing.assert_allclose(sorted(seg[:, 0]), [-2, 1], atol=1e-12)


def test_check_pair_presets(tmp_path):
    code, out = _run(tmp_path, "check-pair", "--preset", "pauli-xxzz", "--scan-k", "4")
    data = json.loads((out / "check-pair.json").read_text())
    assert code == EXIT_OK and data["thm1_satisfied"] and data["cor1_satisfied"]
    assert all(r["side_entangled"] != "neither" for r in data["scan"])
    code, out = _run(tmp_path, "check-pair", "--preset", "cor1-projectors")
    data = json.loads((out / "check-pair.json").read_text())
    assert not data["thm1_satisfied"] and data["cor1_satisfied"]
    assert _run(tmp_path, "check-pair", "--preset", "pauli-xz")[0] == EXIT_INPUT


def test_detect_singlet_and_mixed(tmp_path):
    code, out = _run(tmp_path, "detect", "--preset", "pauli-xxzz", "--state", "singlet")
    data = json.loads((out / "detect.json").read_text())
    assert code == EXIT_OK and data["detected"] and data["npt"]
    assert data["witness_value"] < 0 and data["consistent"]
    code, out = _run(tmp_path, "detect", "--preset", "pauli-xxzz", "--state", "mixed")
    data = json.loads((out / "detect.json").read_text())
    assert code == EXIT_NEGATIVE and not data["detected"] and not data["npt"]


def test_refine_commands(tmp_path):
    code, out = _run(tmp_path, "refine", "--preset", "commuting")
    data = json.loads((out / "refine.json").read_text())
    assert data["fully_reducible"] and data["changed"]
    assert code in (EXIT_OK, EXIT_NEGATIVE)
    code, out = _run(tmp_path, "refine", "--preset", "pauli-xxzz")
    data = json.loads((out / "refine.json").read_text())
    assert code == EXIT_OK and not data["changed"] and data["certificates"] == []


def test_refine_reports_failed_certificate(tmp_path):
    code, out = _run(tmp_path, "refine", "--preset", "planted-common")
    data = json.loads((out / "refine.json").read_text())
    assert code == EXIT_NEGATIVE
    assert min(r["difference_min_eigenvalue"] for r in data["certificates"]) < -1e-3


def test_experiments(tmp_path):
    code, out = _run(tmp_path, "experiments", "--appendix-a", "--appendix-b")
    data = json.loads((out / "experiments.json").read_text())
    assert code == EXIT_OK
    assert data["appendix_a"]["status"] == "holds"
    by_name = {r["input"]: r for r in data["appendix_b"]}
    assert by_name["perturb-local"]["local_condition"] is True
    assert by_name["perturb-nonlocal"]["local_condition"] is False
    assert all(r["consistent"] for r in data["appendix_b"])
    code, out = _run(tmp_path, "experiments", "--appendix-b", "--preset", "perturb-nonlocal", "--x-grid", "0")
    rows = json.loads((out / "experiments.json").read_text())["appendix_b"][0]["rows"]
    assert rows[0]["separable_ground_exists"]
    assert _run(tmp_path, "experiments")[0] == EXIT_INPUT
    code, out = _run(tmp_path, "experiments", "--appendix-b", "--preset", "commuting")
    assert code == EXIT_OK
    assert json.loads((out / "experiments.json").read_text())["appendix_b"][0]["status"] == "skipped"


def test_outputs_are_byte_identical_under_seed(tmp_path):
    args = ["range", "--preset", "pauli-xxzz", "--cloud", "40", "--seed", "7", "--tangent=1,1"]
    main([*args, "--out", str(tmp_path / "a"), *FAST])
    main([*args, "--out", str(tmp_path / "b"), *FAST])
    for name in ("joint.csv", "separable.csv", "cloud.csv", "range.svg", "range.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_json_handles_non_finite():
    assert io.to_jsonable({"a": float("nan"), "b": np.array([1 + 1j])}) == {"a": None, "b": {"re": [1.0], "im": [1.0]}}


def test_custom_pair_file_runs(tmp_path):
    pair = ProductPair(X, Z, X, Z)
    p = _write(tmp_path / "p.json", io.to_jsonable(io.pair_to_json(pair)))
    code, out = _run(tmp_path, "detect", "--pair", str(p), "--state", "phi-plus")
    assert code == EXIT_OK
    data = json.loads((out / "detect.json").read_text())
    np.testing.assert_allclose(data["direction"], [-2**-0.5, -2**-0.5], atol=1e-6)

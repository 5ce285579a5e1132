from src.cli import run
from src.formats import dump_psm, dump_ratmatrix, read_matrix_file

from .helpers import rm


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_structure_at_infinity_of_a_rational_matrix(tmp_path, capsys, grade_example_G):
    path = _write(tmp_path, "G.rm", dump_ratmatrix(grade_example_G))
    code, out, _ = _run(capsys, "structure", path, "--at-inf")
    assert code == 0
    assert "point: inf" in out
    assert "orders: -2 -1" in out

    code, out, _ = _run(capsys, "structure", path, "--at", "0")
    assert code == 0
    assert "orders: -1 0" in out
    assert "pole multiplicities: 1" in out


def test_structure_of_a_psm_with_grade(tmp_path, capsys, grade_example_L):
    path = _write(tmp_path, "L.psm", dump_psm(grade_example_L))
    code, out, _ = _run(capsys, "structure", path, "--at-inf", "--grade", "1")
    assert code == 0
    assert "orders: -2 -1" in out

    code, out, _ = _run(capsys, "structure", path, "--at", "0")
    assert code == 0
    assert "pole multiplicities: 1" in out


def test_structure_needs_one_point(tmp_path, capsys, grade_example_G):
    path = _write(tmp_path, "G.rm", dump_ratmatrix(grade_example_G))
    code, _, err = _run(capsys, "structure", path)
    assert code == 2
    assert err.startswith("error:")


def test_minimal(tmp_path, capsys, grade_example_L):
    path = _write(tmp_path, "L.psm", dump_psm(grade_example_L))
    code, out, _ = _run(capsys, "minimal", path, "--region", "all")
    assert code == 0
    assert "minimal: true" in out
    assert "defects: {}" in out
    code, out, _ = _run(capsys, "minimal", path, "--strong")
    assert "strongly minimal: true" in out


def test_smith_mcmillan_of_identity(tmp_path, capsys):
    path = _write(tmp_path, "I.pm", "polymatrix 3 3\n1; 0; 0\n0; 1; 0\n0; 0; 1\n")
    code, out, _ = _run(capsys, "sm", path)
    assert code == 0
    assert out.splitlines() == ["rank: 3", "region: all", "1: 1 / 1", "2: 1 / 1", "3: 1 / 1"]


def test_check_lin_answers_both_ways(tmp_path, capsys, grade_example_L, grade_example_G):
    pencil = _write(tmp_path, "L.psm", dump_psm(grade_example_L))
    target = _write(tmp_path, "G.rm", dump_ratmatrix(grade_example_G))
    code, out, _ = _run(capsys, "check-lin", pencil, "--target", target)
    assert code == 0
    assert out.startswith("holds: true")

    code, out, _ = _run(capsys, "check-lin", pencil, "--target", target, "--inf", "--grade", "2")
    assert code == 0
    assert "holds: false" in out

    wrong = rm([["(l^2 + l - 1)/l + 1/(l - 1)", "-1/l"], [-1, "-l^2 + l - 2"]])
    wrong_path = _write(tmp_path, "wrong.rm", dump_ratmatrix(wrong))
    code, out, _ = _run(capsys, "check-lin", pencil, "--target", wrong_path, "--at", "1")
    assert code == 0
    assert "holds: false" in out
    assert "witness:" in out


def test_check_lin_infinity_needs_a_grade(tmp_path, capsys, grade_example_L, grade_example_G):
    pencil = _write(tmp_path, "L.psm", dump_psm(grade_example_L))
    target = _write(tmp_path, "G.rm", dump_ratmatrix(grade_example_G))
    code, _, err = _run(capsys, "check-lin", pencil, "--target", target, "--inf")
    assert code == 2
    assert "--grade" in err


def test_classify(tmp_path, capsys):
    pencil = _write(tmp_path, "L.psm", "polymatrix 2 2\nl; 1\n-1; l\nstaterows:\nstatecols:\n")
    target = _write(tmp_path, "G.rm", "ratmatrix 1 1\nl^2 + 1\n")
    code, out, _ = _run(capsys, "check-lin", pencil, "--target", target, "--classify")
    assert code == 0
    assert out.splitlines() == ["kind: gG_strong", "grade: 2"]


def test_build_writes_all_outputs(tmp_path, capsys):
    params = _write(
        tmp_path, "subai.yaml",
        "family: subai\nD: [[[1]], [[0]], [[1]]]\nA: [[2]]\nB: [[1]]\nC: [[1]]\n",
    )
    prefix = str(tmp_path / "out")
    code, out, _ = _run(capsys, "build", "subai", params, "-o", prefix)
    assert code == 0
    assert "family: subai" in out
    assert "empty-state region: except:{2}" in out
    assert "(1,0)->2" in out
    for suffix in (".G.rm", ".pencil.pm", ".psm", ".dual.rm", ".cert.txt"):
        assert (tmp_path / f"out{suffix}").exists()
    document = read_matrix_file(prefix + ".psm")
    assert document.rational() == rm([["l^2 + 1 + 1/(l - 2)"]])


def test_build_reports_unwritable_output(tmp_path, capsys):
    params = _write(
        tmp_path, "subai.yaml",
        "family: subai\nD: [[[1]], [[0]], [[1]]]\nA: [[2]]\nB: [[1]]\nC: [[1]]\n",
    )
    prefix = str(tmp_path / "missing" / "out")
    code, _, err = _run(capsys, "build", "subai", params, "-o", prefix)
    assert code == 2
    assert "cannot write" in err


def test_build_rejects_a_mismatched_family(tmp_path, capsys):
    params = _write(tmp_path, "saad.yaml", "family: saad\nA0: [[1]]\nB0: [[0]]\n")
    code, _, err = _run(capsys, "build", "subai", params, "-o", str(tmp_path / "out"))
    assert code == 2
    assert "family" in err


def test_eig(tmp_path, capsys):
    path = _write(tmp_path, "P.pm", "polymatrix 2 2\nl - 1; 0\n0; (l - 1)*(l + 2)\n")
    code, out, _ = _run(capsys, "eig", path)
    assert code == 0
    assert out.splitlines() == ["eigenvalue -2: 1", "eigenvalue 1: 1 1"]
    code, out, _ = _run(capsys, "eig", path, "--region", "except:{1}")
    assert out.splitlines() == ["eigenvalue -2: 1"]


def test_oracle(tmp_path, capsys):
    path = _write(tmp_path, "J.pm", "polymatrix 2 2\nl; 1\n0; l\n")
    code, out, _ = _run(capsys, "oracle", "smith", path)
    assert code == 0
    assert out.splitlines()[0] == "agree: true"
    assert "  d2: l^2" in out.splitlines()


def test_bad_input_exit_codes(tmp_path, capsys):
    code, _, err = _run(capsys, "smith", str(tmp_path / "missing.pm"))
    assert code == 2
    assert err.startswith("error:")
    bad = _write(tmp_path, "bad.pm", "polymatrix 1 1\nq\n")
    code, _, err = _run(capsys, "smith", bad)
    assert code == 2
    assert "line 2" in err
    code, _, _ = _run(capsys, "frobnicate")
    assert code == 2
    code, _, _ = _run(capsys)
    assert code == 2

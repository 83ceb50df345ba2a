import re

import pytest

from evencw import cli, formats
from evencw.complex import FAMILIES, generate, k4_projective, random_complex, torus_grid
from evencw.errors import InputError
from evencw.graph import circular_complete_graph, cycle_graph
from evencw.coloring import ChromaticResult, ColoringCertificate


GENERATED = [
    ("sphere_grid", dict(m=2, n=3)),
    ("torus_grid", dict(m=3, n=4)),
    ("klein_grid", dict(m=3, n=3)),
    ("projective_grid", dict(m=3, n=4)),
    ("k4_projective", {}),
    ("cube_boundary", dict(d=3)),
    ("cubical_rp", dict(d=2)),
    ("random", dict(seed=4, vertices=9)),
]


@pytest.mark.parametrize("family, params", GENERATED)
def test_complex_round_trip_is_byte_identical(family, params):
    text = formats.dump_complex(generate(family, **params))
    again = formats.dump_complex(formats.load_complex(text))
    assert again == text


def test_random_complexes_round_trip_with_extra_edges():
    for seed in range(40):
        x = random_complex(seed)
        text = formats.dump_complex(x)
        y = formats.load_complex(text)
        assert y.skeleton == x.skeleton
        assert sorted(y.cell_classes()) == sorted(x.cell_classes())
        assert formats.dump_complex(y) == text


def test_graph_and_coloring_round_trip():
    g = circular_complete_graph(7, 3)
    text = formats.dump_graph(g)
    assert formats.load_graph(text) == g
    assert formats.dump_graph(formats.load_graph(text)) == text
    c, n = formats.load_coloring("colors: 3\nassignment: [0, 1, 2]\n")
    assert (c.image, n) == ((0, 1, 2), 3)
    assert formats.dump_coloring(c, n) == "colors: 3\nassignment: [0,1,2]\n"


@pytest.mark.parametrize(
    "text",
    [
        "vertices: 3\n",
        "vertices: 3\nedges: [[0,1]]\nedges: [[1,2]]\n",
        "vertices: 3\nedges: [[0,1,2]]\n",
        "vertices: x\nedges: []\n",
        "vertices: 3\nedges: [[0,1]]\ncolour: 2\n",
        "vertices 3\nedges: []\n",
    ],
)
def test_bad_graph_files(text):
    with pytest.raises(InputError):
        formats.load_graph(text)


def test_bad_coloring_file():
    with pytest.raises(InputError):
        formats.load_coloring("colors: 2\nassignment: [0, 2]\n")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_and_homology(tmp_path, capsys):
    path = tmp_path / "rp.cx"
    code, out, _ = run(capsys, "gen", "cubical-rp", "--d", "2", "--out", str(path))
    assert code == 0 and "euler: 1" in out
    code, out, _ = run(capsys, "homology", str(path))
    assert code == 0 and "H1(Z): Z/2" in out and "[pass] universal-coefficients" in out
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 0 and "[pass] valid" in out


def test_gen_to_stdout_is_the_file(capsys):
    code, out, err = run(capsys, "gen", "k4-projective")
    assert code == 0
    assert out == formats.dump_complex(k4_projective())
    assert "cells: 3" in err


def test_gen_failure_exits_1(capsys):
    code, _, err = run(capsys, "gen", "projective-grid", "--m", "2", "--n", "2")
    assert code == 1 and "faces" in err


def test_verify_k4(tmp_path, capsys):
    path = tmp_path / "k4.cx"
    path.write_text(formats.dump_complex(k4_projective()))
    code, out, _ = run(capsys, "--format", "keyvalue", "verify", str(path))
    assert code == 0
    assert "H1(Z)=Z/2" in out and "chi=4" in out and "theorem_A_bound=4" in out
    assert "colorings_without_a_rainbow_face=0" in out
    assert "violation" not in out


def test_verify_flags_theorem_violation(tmp_path, capsys, monkeypatch):
    path = tmp_path / "k4.cx"
    path.write_text(formats.dump_complex(k4_projective()))
    fake = ChromaticResult(3, ColoringCertificate(None, 3), None, [])
    monkeypatch.setattr(cli, "chromatic_number", lambda g, limit=0: fake)
    code, out, _ = run(capsys, "verify", str(path), "--checks", "youngs")
    assert code == 2 and "[violation] not 3-colorable" in out


def test_verify_bipartite_torus(tmp_path, capsys):
    path = tmp_path / "t.cx"
    path.write_text(formats.dump_complex(torus_grid(4, 4)))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0
    assert "odd walk: none (bipartite skeleton)" in out
    assert "chi: 2" in out and "theorem A bound: inapplicable" in out


def test_pi1k_expect(capsys):
    code, out, _ = run(capsys, "pi1k", "--family", "circular", "5", "2", "--k", "2..6", "--expect", "5", "2")
    assert code == 0
    assert re.findall(r"k=\d: (\S+)", out) == ["Z", "Z", "Z", "Z/2", "Z/2"]
    code, out, _ = run(capsys, "pi1k", "--family", "circular", "7", "3", "--k", "6..7")
    assert re.findall(r"k=\d: (\S+)", out) == ["Z", "Z/2"]
    code, out, _ = run(capsys, "pi1k", "--family", "path", "5", "--k", "2..4")
    assert re.findall(r"k=\d: (\S+)", out) == ["0", "0", "0"]


def test_pi1k_expect_mismatch_exits_2(capsys):
    code, out, _ = run(capsys, "pi1k", "--family", "circular", "5", "2", "--k", "2..6", "--expect", "7", "3")
    assert code == 2


def test_lift_reduce_chic(tmp_path, capsys):
    code, out, _ = run(capsys, "lift", "--n", "5", "--m", "2", "--walk", "0,2,4,1,3,0")
    assert code == 0 and "winding: -1" in out and "numerators: 0,-1,-2,-3,-4,-5" in out
    cert = tmp_path / "moves.txt"
    code, out, _ = run(capsys, "reduce", "--walk", "0,1,2,3,0", "--k", "2", "--cert", str(cert))
    assert code == 0 and "answer: yes" in out
    assert len(cert.read_text().splitlines()) <= 4
    code, out, _ = run(capsys, "replay", "--kind", "moves", "--certificate", str(cert), "--walk", "0,1,2,3,0",
                       "--k", "2")
    assert code == 0 and "[pass] ends at target" in out
    code, out, _ = run(capsys, "chic", "--family", "cycle", "7", "--max-den", "8")
    assert code == 0 and "chi_c: 7/3 (exact)" in out


def test_chi_trace_replays(tmp_path, capsys):
    path = tmp_path / "k4.cx"
    path.write_text(formats.dump_complex(k4_projective()))
    trace = tmp_path / "trace.txt"
    code, out, _ = run(capsys, "chi", str(path), "--trace", str(trace))
    assert code == 0 and "chi: 4" in out
    code, out, _ = run(capsys, "replay", str(path), "--kind", "coloring", "--colors", "3",
                       "--certificate", str(trace))
    assert code == 0
    trace.write_text("\n".join(trace.read_text().splitlines()[:-2]) + "\n")
    code, out, _ = run(capsys, "replay", str(path), "--kind", "coloring", "--colors", "3",
                       "--certificate", str(trace))
    assert code == 1


def test_hom_nbhd_torsion(tmp_path, capsys):
    code, out, _ = run(capsys, "hom", "cycle:5", "circular:5:2")
    assert code == 0 and "homomorphism: none" not in out
    code, out, _ = run(capsys, "hom", "complete:3", "circular:7:3")
    assert "homomorphism: none" in out
    code, out, _ = run(capsys, "nbhd", "--family", "cycle", "5", "--j", "1..3")
    assert re.findall(r"H1\(N\^\d\): (\S+)", out) == ["Z", "Z", "0"]
    path = tmp_path / "k4.cx"
    path.write_text(formats.dump_complex(k4_projective()))
    code, out, _ = run(capsys, "torsion", str(path), "--walk", "0,1,2,0")
    assert code == 0 and "torsion: yes" in out


def test_rainbow_with_coloring_file(tmp_path, capsys):
    cx = tmp_path / "k4.cx"
    cx.write_text(formats.dump_complex(k4_projective()))
    col = tmp_path / "c.txt"
    col.write_text(formats.dump_coloring([0, 1, 2, 3], 4))
    code, out, _ = run(capsys, "rainbow", str(cx), "--coloring", str(col))
    assert code == 0 and "rainbow faces: 0,1,2,3,0,1,3,2,0,2,1,3" in out


def test_missing_file_exits_1(capsys):
    code, _, err = run(capsys, "homology", "/nonexistent/file.cx")
    assert code == 1 and "cannot read" in err


def test_reports_are_deterministic(tmp_path, capsys):
    path = tmp_path / "k4.cx"
    path.write_text(formats.dump_complex(k4_projective()))
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "--format", "keyvalue", "verify", str(path))
        outs.append([ln for ln in out.splitlines() if not ln.startswith("time_seconds")])
    assert outs[0] == outs[1]


def test_all_families_are_exposed():
    parser = cli.build_parser()
    for fam in FAMILIES:
        assert parser.parse_args(["gen", fam.replace("_", "-")]).family

import json
import math

import numpy as np
import pytest

from strataudit.cli import main
from strataudit.ingest import GrayImage, read_gsc, write_pgm


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_generate_and_stratify(tmp_path, capsys):
    g = tmp_path / "t.gsc"
    assert main(["generate", "triangle", "--output", str(g)]) == 0
    code, out = run(capsys, "stratify", "--input", str(g))
    assert code == 0 and len(out.splitlines()) == 7


def test_observe_and_descriptors(tmp_path, capsys):
    g = tmp_path / "t.gsc"
    main(["generate", "triangle", "--output", str(g)])
    code, out = run(capsys, "observe", "--input", str(g))
    assert code == 0 and out.startswith("vertex,arc_start")
    code, out = run(capsys, "descriptors", "--input", str(g), "--direction", str(math.pi / 2), "--type", "pd")
    obj = json.loads(out)
    assert code == 0 and obj["type"] == "pd"
    code, out = run(capsys, "descriptors", "--input", str(g), "--direction", "1.0", "--type", "betti")
    assert set(json.loads(out)) >= {"beta0", "beta1"}


def test_sample_schemes(capsys):
    code, out = run(capsys, "sample", "--scheme", "grid", "--k", "4")
    assert code == 0 and len(out.split()) == 4
    code, out = run(capsys, "sample", "--scheme", "eps", "--eps", "1.0")
    assert len(out.split()) == 7


def test_compare(tmp_path, capsys):
    a, b = tmp_path / "a.gsc", tmp_path / "b.gsc"
    main(["generate", "cycle", "--n", "5", "--seed", "1", "--output", str(a)])
    main(["generate", "cycle", "--n", "5", "--seed", "2", "--output", str(b)])
    code, out = run(capsys, "compare", "--input", str(a), str(a))
    assert code == 0 and json.loads(out)["distance"] == 0.0
    code, out = run(capsys, "compare", "--input", str(a), str(b), "--type", "pd")
    assert json.loads(out)["distance"] > 0


def test_ingest_ok_and_rejected(tmp_path, capsys):
    yy, xx = np.mgrid[:64, :64]
    img = GrayImage.from_array(((xx - 31.5) ** 2 + (yy - 31.5) ** 2 <= 24 ** 2).astype(int) * 255)
    p = tmp_path / "d.pgm"
    p.write_bytes(write_pgm(img))
    out = tmp_path / "d.gsc"
    assert main(["ingest", "--input", str(p), "--output", str(out)]) == 0
    assert read_gsc(out.read_bytes()).n_vertices >= 3
    blank = tmp_path / "b.pgm"
    blank.write_bytes(write_pgm(GrayImage(4, 4, (0,) * 16)))
    assert main(["ingest", "--input", str(blank)]) == 2


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.gsc"
    bad.write_text("gsc 2\nv 0 0\nv 1 0\nv 0 1\nt 0 1 2\n")
    assert main(["stratify", "--input", str(bad)]) == 2
    assert main(["stratify", "--input", str(tmp_path / "missing.gsc")]) == 1
    crossing = tmp_path / "x.gsc"
    crossing.write_text("gsc 2\nv 0 0\nv 2 2.1\nv 0 2\nv 2.2 0\ne 0 1\ne 2 3\n")
    assert main(["observe", "--input", str(crossing)]) == 2
    with pytest.raises(SystemExit):
        main(["nope"])


def test_experiment_with_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"name": "lower-bound", "corpus": {"n": [1, 2, 3]}}))
    code, out = run(capsys, "experiment", "lower-bound", "--config", str(cfg), "--output", str(tmp_path / "o"))
    assert code == 0 and json.loads(out)["all_disjoint"]
    assert (tmp_path / "o" / "lower_bound.json").exists()

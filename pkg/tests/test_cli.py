import numpy as np
import pytest

from wdro import ParseError
from wdro.cli import load_csv, main, read_record, write_record
from _synth import logistic_blobs, regression_blobs, write_csv


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_csv_basic(tmp_path):
    p = _write(tmp_path / "d.csv", "x1,x2,y\n1.0,2.0,1\n-0.5,0.25,-1\n")
    ds = load_csv(p)
    assert ds.n == 2 and ds.dim == 2
    assert np.allclose(ds.features, [[1.0, 2.0], [-0.5, 0.25]])
    assert np.allclose(ds.labels, [1.0, -1.0])


def test_load_csv_label_column_by_name(tmp_path):
    p = _write(tmp_path / "d.csv", "x1,x2,y\n1.0,2.0,3.0\n4.0,5.0,6.0\n")
    ds = load_csv(p, label_col="x1")
    # remaining columns keep their file order
    assert np.allclose(ds.features, [[2.0, 3.0], [5.0, 6.0]])
    assert np.allclose(ds.labels, [1.0, 4.0])


def test_load_csv_skips_blank_lines(tmp_path):
    p = _write(tmp_path / "d.csv", "x1,y\n1.0,1\n\n2.0,-1\n\n")
    assert load_csv(p).n == 2


def test_load_csv_error_reporting(tmp_path):
    ragged = _write(tmp_path / "a.csv", "x1,x2,y\n1,2,3\n1,2\n")
    with pytest.raises(ParseError) as ei:
        load_csv(ragged)
    assert ei.value.line == 3
    assert "line 3" in str(ei.value)

    bad = _write(tmp_path / "b.csv", "x1,y\n1,2\noops,3\n")
    with pytest.raises(ParseError) as ei:
        load_csv(bad)
    assert ei.value.line == 3

    missing = _write(tmp_path / "c.csv", "x1,y\n1,2\n")
    with pytest.raises(ParseError):
        load_csv(missing, label_col="target")

    empty = _write(tmp_path / "e.csv", "")
    with pytest.raises(ParseError):
        load_csv(empty)


def test_record_round_trip(tmp_path):
    path = str(tmp_path / "rec.txt")
    record = {"b_val": 0.1 + 0.2, "a_val": 3, "flag": True, "name": "erm"}
    write_record(path, record)
    text = open(path, encoding="utf-8").read()
    # canonical: sorted keys, repr floats, lowercase booleans
    assert text.splitlines()[0].startswith("a_val=")
    assert "flag=true" in text
    back = read_record(path)
    assert float(back["b_val"]) == 0.1 + 0.2
    assert back["name"] == "erm"


def test_fit_erm_and_wdro_records(tmp_path):
    csv = str(tmp_path / "train.csv")
    write_csv(logistic_blobs(20, 2, scale=1.0, seed=1), csv)

    erm_out = str(tmp_path / "erm.txt")
    rc = main(["fit", "--task", "classification", "--input", csv,
               "--output", erm_out, "--max-iters", "20"])
    assert rc == 0
    rec = read_record(erm_out)
    assert rec["method"] == "erm"
    assert float(rec["lambda"]) == 0.0
    assert rec["dim"] == "2" and rec["n_train"] == "20"
    assert "weight0" in rec and "weight1" in rec

    wdro_out = str(tmp_path / "wdro.txt")
    rc = main(["fit", "--task", "classification", "--input", csv,
               "--output", wdro_out, "--rho", "0.2", "--max-iters", "20"])
    assert rc == 0
    rec = read_record(wdro_out)
    assert rec["method"] == "wdro"
    assert float(rec["lambda"]) > 0.0
    # calibrated defaults recorded for reproducibility
    assert float(rec["sigma"]) == 0.2
    assert float(rec["epsilon"]) == pytest.approx(0.02)
    assert rec["cost_power"] == "2"


def test_fit_reruns_are_byte_identical(tmp_path):
    csv = str(tmp_path / "train.csv")
    write_csv(logistic_blobs(15, 2, scale=1.0, seed=2), csv)
    outs = []
    for name in ("one.txt", "two.txt"):
        out = str(tmp_path / name)
        rc = main(["fit", "--task", "classification", "--input", csv,
                   "--output", out, "--rho", "0.1", "--sigma", "0.2",
                   "--epsilon", "0.05", "--samples", "8", "--seed", "4",
                   "--max-iters", "15"])
        assert rc == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_fit_rejects_negative_rho(tmp_path, capsys):
    csv = str(tmp_path / "train.csv")
    write_csv(logistic_blobs(10, 2, scale=1.0, seed=3), csv)
    rc = main(["fit", "--task", "classification", "--input", csv,
               "--output", str(tmp_path / "out.txt"), "--rho", "-1"])
    assert rc == 2
    assert "rho must be nonnegative" in capsys.readouterr().err


def test_missing_input_exits_cleanly(tmp_path, capsys):
    rc = main(["fit", "--task", "regression", "--input",
               str(tmp_path / "nope.csv"), "--output", str(tmp_path / "o.txt")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_eval_round_trip_perfect_model(tmp_path):
    # y = 2x + 1 exactly; a handcrafted model file must score zero loss
    X = np.array([[0.0], [1.0], [-2.0]])
    csv = _write(tmp_path / "data.csv", "x0,y\n" + "".join(
        f"{float(x[0])!r},{float(2 * x[0] + 1)!r}\n" for x in X))
    model = str(tmp_path / "model.txt")
    write_record(model, {"task": "regression", "dim": 1,
                         "weight0": 2.0, "bias": 1.0})
    out = str(tmp_path / "metrics.txt")
    assert main(["eval", "--model", model, "--input", csv, "--output", out]) == 0
    rec = read_record(out)
    assert float(rec["mean_loss"]) == 0.0
    assert float(rec["rmse"]) == 0.0
    assert rec["n_eval"] == "3"


def test_eval_of_fit_output(tmp_path):
    csv = str(tmp_path / "train.csv")
    write_csv(regression_blobs(25, 2, seed=6), csv)
    model = str(tmp_path / "model.txt")
    assert main(["fit", "--task", "regression", "--input", csv,
                 "--output", model, "--max-iters", "200", "--lr", "0.1"]) == 0
    out = str(tmp_path / "metrics.txt")
    assert main(["eval", "--model", model, "--input", csv, "--output", out]) == 0
    rec = read_record(out)
    assert float(rec["rmse"]) < 1.0


def test_eval_dimension_mismatch(tmp_path, capsys):
    model = str(tmp_path / "model.txt")
    write_record(model, {"task": "classification", "dim": 1,
                         "weight0": 1.0, "bias": 0.0})
    csv = _write(tmp_path / "d.csv", "x1,x2,y\n1.0,2.0,1\n")
    rc = main(["eval", "--model", model, "--input", csv,
               "--output", str(tmp_path / "o.txt")])
    assert rc == 2
    assert "does not match" in capsys.readouterr().err


def test_eval_rejects_unknown_task(tmp_path, capsys):
    model = str(tmp_path / "model.txt")
    write_record(model, {"task": "ranking", "dim": 1, "weight0": 1.0, "bias": 0.0})
    csv = _write(tmp_path / "d.csv", "x1,y\n1.0,1\n")
    rc = main(["eval", "--model", model, "--input", csv,
               "--output", str(tmp_path / "o.txt")])
    assert rc == 2
    assert "unknown task" in capsys.readouterr().err


def test_bench_shift_record_and_determinism(tmp_path):
    csv = str(tmp_path / "data.csv")
    write_csv(logistic_blobs(30, 2, scale=1.0, seed=8), csv)
    blobs = []
    for name in ("b1.txt", "b2.txt"):
        out = str(tmp_path / name)
        rc = main(["bench-shift", "--input", csv, "--output", out,
                   "--trials", "2", "--shifts", "0,0.25", "--rho", "0.1",
                   "--sigma", "0.2", "--epsilon", "0.05", "--samples", "6",
                   "--max-iters", "10", "--seed", "5"])
        assert rc == 0
        blobs.append(open(out, "rb").read())
    assert blobs[0] == blobs[1]
    rec = read_record(str(tmp_path / "b1.txt"))
    for t in ("trial000", "trial001"):
        for model in ("erm", "wdro"):
            assert f"{t}.delta0.25.{model}.mean_loss" in rec
            assert f"{t}.delta0.0.{model}.accuracy" in rec
    assert "mean.delta0.25.wdro.mean_loss" in rec
    assert rec["trials"] == "2"


def test_bench_shift_requires_classification(tmp_path, capsys):
    csv = str(tmp_path / "data.csv")
    write_csv(regression_blobs(10, 1, seed=9), csv)
    rc = main(["bench-shift", "--task", "regression", "--input", csv,
               "--output", str(tmp_path / "o.txt")])
    assert rc == 2
    assert "classification" in capsys.readouterr().err

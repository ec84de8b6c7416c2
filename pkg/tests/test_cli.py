import json
import math

import pytest

from qmono.cli import main


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


def test_example1_command(tmp_path):
    out = tmp_path / "ex1"
    assert main(["example1", "--out", str(out), "--no-plot"]) == 0
    values = json.loads((out / "values.json").read_text())
    assert values["schema"] == 1
    assert values["C_A_BC"] == pytest.approx(math.sqrt(21) / 6, abs=1e-10)
    assert values["C_AB"] == pytest.approx(math.sqrt(6) / 6, abs=1e-10)
    assert values["C_AC"] == pytest.approx(0.5, abs=1e-10)
    assert values["k"] == pytest.approx(math.sqrt(6) / 2)

    header, rows = read_csv(out / "fig1.csv")
    assert header == ["alpha", "gamma", "lhs", "bound_new", "bound_zhu",
                      "condition_holds"]
    assert len(rows) == 101 * 61
    assert all(r[5] == "1" for r in rows)
    header2, rows2 = read_csv(out / "fig2.csv")
    assert header2 == ["alpha", "gamma", "z"]
    assert len(rows2) == 101 * 61
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["outputs"]) == {"values.json", "fig1.csv", "fig2.csv"}
    assert not (out / "fig1.png").exists()


def test_example1_rendering(tmp_path):
    out = tmp_path / "ex1"
    assert main(["example1", "--out", str(out)]) == 0
    for name in ("fig1.png", "fig2.png"):
        assert (out / name).stat().st_size > 5000
    manifest = json.loads((out / "manifest.json").read_text())
    assert "fig1.png" in manifest["outputs"]


def test_example3_command(tmp_path):
    out = tmp_path / "ex3"
    assert main(["example3", "--out", str(out), "--no-plot",
                 "--restarts", "6"]) == 0
    values = json.loads((out / "values.json").read_text())
    assert values["Na_A_B1B2"]["closed"] == pytest.approx(0.75, abs=1e-10)
    assert values["Na_AB1"]["closed"] == pytest.approx(0.25, abs=1e-10)
    assert values["Na_AB2"]["closed"] == pytest.approx(0.5, abs=1e-10)
    assert values["Na_AB1"]["oracle"] == pytest.approx(0.25, abs=5e-3)
    assert values["k_at_delta_1"] == pytest.approx(2.0, abs=1e-10)
    header, rows = read_csv(out / "fig3.csv")
    assert header == ["beta", "delta", "lhs", "bound_new", "condition_holds"]
    assert len(rows) == 61 * 50
    # the theorem's guarantee on the emitted surface
    for r in rows:
        if r[4] == "1":
            assert float(r[2]) <= float(r[3]) + 1e-9


def test_example3_rendering(tmp_path):
    out = tmp_path / "ex3"
    assert main(["example3", "--out", str(out), "--restarts", "2"]) == 0
    assert (out / "fig3.png").stat().st_size > 5000


def test_sweep_matches_example1_rows(tmp_path):
    out1 = tmp_path / "ex1"
    main(["example1", "--out", str(out1), "--no-plot"])
    _, fig1_rows = read_csv(out1 / "fig1.csv")

    s6 = repr(math.sqrt(6) / 6)
    spec = f"gsd:0.5,{s6},{s6},0.5,{s6}"
    k = repr(math.sqrt(6) / 2)
    surface = tmp_path / "surface.csv"
    assert main(["sweep", "--state", spec, "--measure", "concurrence",
                 "--x1", "0:2:0.02", "--x2", "2:5:0.05", "--k", k,
                 "--out", str(surface)]) == 0
    header, rows = read_csv(surface)
    assert header == ["x1", "x2", "k", "lhs", "bound_new", "bound_prior",
                      "margin", "condition_holds", "branch"]
    assert len(rows) == len(fig1_rows)
    for sweep_row, fig_row in zip(rows, fig1_rows):
        assert sweep_row[0] == fig_row[0]      # alpha
        assert sweep_row[1] == fig_row[1]      # gamma
        assert sweep_row[3] == fig_row[2]      # lhs, bitwise
        assert sweep_row[4] == fig_row[3]      # bound_new, bitwise
        assert sweep_row[5] == fig_row[4]      # prior, bitwise
        assert sweep_row[7] == fig_row[5]


def test_sweep_ghz_degenerates(tmp_path):
    surface = tmp_path / "ghz.csv"
    assert main(["sweep", "--state", "ghz", "--measure", "concurrence",
                 "--x1", "0.5:1.5:0.5", "--x2", "2:3:0.5", "--k", "auto",
                 "--out", str(surface)]) == 0
    _, rows = read_csv(surface)
    for r in rows:
        assert float(r[3]) == pytest.approx(1.0, abs=1e-10)  # lhs = 1
        assert float(r[4]) == pytest.approx(0.0, abs=1e-10)  # bound terms 0
        assert r[8] == "degenerate-zero"


def test_sweep_auto_k_tightness(tmp_path):
    surface = tmp_path / "rand.csv"
    assert main(["sweep", "--state", "random:7", "--measure", "concurrence",
                 "--x1", "0.2:1.8:0.2", "--x2", "2:4:0.25", "--k", "auto",
                 "--out", str(surface)]) == 0
    _, rows = read_csv(surface)
    for r in rows:
        bound_new, bound_prior = float(r[4]), float(r[5])
        assert bound_new >= bound_prior - 1e-12


def test_sweep_plot_flag(tmp_path):
    surface = tmp_path / "w.csv"
    assert main(["sweep", "--state", "w", "--measure", "screnoa",
                 "--x1", "1:2:0.5", "--x2", "0.5:1:0.25", "--k", "auto",
                 "--out", str(surface), "--plot"]) == 0
    assert surface.with_suffix(".png").stat().st_size > 5000


def test_fuzz_lemma_mode(tmp_path):
    report_path = tmp_path / "lemma.json"
    assert main(["fuzz", "--mode", "lemma", "--out", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["schema"] == 1
    assert report["counts"]["violations"] == 0
    assert report["counts"]["checked"] == 51005 + 25755


def test_fuzz_monogamy_small(tmp_path):
    report_path = tmp_path / "fuzz.json"
    code = main(["fuzz", "--measure", "concurrence", "--mode", "monogamy",
                 "--n", "300", "--qubits", "3", "--alpha", "2", "--gamma",
                 "2", "--k", "1", "--seed", "3", "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["counts"]["checked"] == 300
    assert report["counts"]["condition_held"] == 300
    assert report["counts"]["violations"] == 0
    assert report["worst_margin"] >= -1e-9


def test_fuzz_polygamy_auto_k(tmp_path):
    report_path = tmp_path / "fuzz_poly.json"
    code = main(["fuzz", "--measure", "screnoa", "--mode", "polygamy",
                 "--n", "200", "--qubits", "3", "--beta", "1.5", "--delta",
                 "1", "--k", "auto", "--seed", "4", "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["counts"]["violations"] == 0


def test_fuzz_chain_small(tmp_path):
    report_path = tmp_path / "fuzz_chain.json"
    code = main(["fuzz", "--measure", "concurrence", "--mode", "monogamy",
                 "--n", "200", "--qubits", "4", "--alpha", "1.5", "--gamma",
                 "2", "--k", "1.2", "--seed", "5", "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["counts"]["checked"] == 200
    assert 0 < report["counts"]["condition_held"] <= 200
    assert report["counts"]["violations"] == 0


def test_oracle_command(tmp_path):
    report_path = tmp_path / "oracle.json"
    code = main(["oracle", "--state", "w@A,B2", "--measure", "screnoa",
                 "--direction", "max", "--restarts", "6",
                 "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["closed_form"] == pytest.approx(0.5, abs=1e-10)
    assert abs(report["oracle"] - report["closed_form"]) <= 5e-3
    assert report["agreement"] is True
    assert report["larger_ensemble_improves"] is False


def test_oracle_seeded_random_reduction(tmp_path):
    report_path = tmp_path / "oracle2.json"
    code = main(["oracle", "--state", "random:11@A,B", "--measure",
                 "concurrence", "--direction", "min", "--restarts", "6",
                 "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["agreement"] is True


def test_usage_errors_exit_2(tmp_path):
    assert main(["sweep", "--state", "nonsense", "--measure", "concurrence",
                 "--x1", "0:1:0.5", "--x2", "2:3:0.5", "--k", "1",
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["fuzz", "--measure", "concurrence", "--mode", "polygamy",
                 "--n", "10", "--qubits", "3",
                 "--out", str(tmp_path / "y.json")]) == 2
    assert main(["fuzz", "--measure", "concurrence", "--mode", "monogamy",
                 "--n", "10", "--qubits", "12",
                 "--out", str(tmp_path / "z.json")]) == 2
    assert main(["oracle", "--state", "w", "--measure", "screnoa",
                 "--direction", "max", "--out", str(tmp_path / "o.json")]) == 2


def test_fuzz_worker_count_does_not_change_results(tmp_path, monkeypatch):
    reports = []
    for workers in ("1", "2"):
        monkeypatch.setenv("QMONO_THREADS", workers)
        path = tmp_path / f"w{workers}.json"
        assert main(["fuzz", "--measure", "concurrence", "--mode", "monogamy",
                     "--n", "2500", "--qubits", "3", "--alpha", "2",
                     "--gamma", "2", "--k", "1", "--seed", "9",
                     "--out", str(path)]) == 0
        reports.append(json.loads(path.read_text()))
    assert reports[0]["counts"] == reports[1]["counts"]
    assert reports[0]["worst_margin"] == reports[1]["worst_margin"]


def test_unwritable_output_exits_2(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    # a file where a directory is needed
    assert main(["example1", "--out", str(blocker / "sub"),
                 "--no-plot"]) == 2

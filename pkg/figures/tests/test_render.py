import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hjs_figures import FigureSpec, SchemaError, build_figure, load_series, render

HEADER = ("t,mean_q,mean_p,var_q,var_p_op,var_p_hj,amp_grad,"
          "uncertainty_product,norm,oracle_mean_q,oracle_mean_p,oracle_var_q,"
          "oracle_var_p_op,oracle_var_p_hj,oracle_amp_grad")


def synthetic_csv(path: Path, kappa: float, n: int = 33):
    t = np.linspace(0, 2 * np.pi, n)
    dq2, dp2 = 0.2254545, 1.9886364 * kappa**2
    rows = [HEADER]
    for i, ti in enumerate(t):
        var_q = dq2 * np.cos(ti) ** 2 + dp2 * np.sin(ti) ** 2
        var_p = dp2 * np.cos(ti) ** 2 + dq2 * np.sin(ti) ** 2
        rows.append(",".join(
            format(v, ".17g") for v in
            (ti, np.sin(ti), np.cos(ti), var_q, var_p,
             dq2 * np.sin(ti) ** 2, dp2 * np.cos(ti) ** 2,
             np.sqrt(var_q * var_p), 1.0)) + ",,,,,,")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def test_load_series_roundtrip(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    data = load_series(p)
    assert data["t"][0] == 0.0
    assert data["mean_p"][0] == 1.0
    assert np.isnan(data["oracle_mean_q"]).all()


def test_load_series_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(SchemaError, match="empty"):
        load_series(p)


def test_load_series_missing_column_named(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,mean_q,mean_p,var_q\n0,0,1,0.2\n")
    with pytest.raises(SchemaError, match="var_p_op"):
        load_series(p)


def test_spec_validation(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    with pytest.raises(SchemaError, match="label"):
        FigureSpec(inputs=(p,), labels=(), output=tmp_path / "f")
    with pytest.raises(SchemaError, match="unique"):
        FigureSpec(inputs=(p, p), labels=("a", "a"), output=tmp_path / "f")
    with pytest.raises(SchemaError, match="panel"):
        FigureSpec(inputs=(p,), labels=("a",), output=tmp_path / "f",
                   panels="sideways")


def test_render_writes_png_and_svg(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    spec = FigureSpec(inputs=(p,), labels=("kappa=1",),
                      output=tmp_path / "fig" / "ensemble")
    written = render(spec)
    assert [w.suffix for w in written] == [".png", ".svg"]
    for w in written:
        assert w.exists() and w.stat().st_size > 1000


def test_figure_structure_two_panels_and_bands(tmp_path):
    paths = [synthetic_csv(tmp_path / f"k{k}.csv", k) for k in (0.5, 1.0, 2.0)]
    series = [load_series(p) for p in paths]
    fig = build_figure(series, ("0.5", "1", "2"), panels="both")
    assert len(fig.axes) == 2
    left, right = fig.axes
    # identical central curves across kappa
    lines = left.get_lines()
    assert len(lines) == 3
    for ln in lines[1:]:
        np.testing.assert_allclose(ln.get_ydata(), lines[0].get_ydata(),
                                   atol=1e-12)
    assert [t.get_text() for t in left.get_legend().get_texts()] == \
        ["0.5", "1", "2"]
    # one shaded band per kappa on each panel
    assert len(left.collections) == 3
    assert len(right.collections) == 3
    assert left.get_xlabel() == "t" and left.get_ylabel() == "q"
    assert right.get_ylabel() == "p"


def test_hj_band_panel_optional(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    fig = build_figure([load_series(p)], ("1",), panels="both", hj_band=True)
    assert len(fig.axes) == 3


def test_cli_render_positional(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    out = tmp_path / "out" / "fig"
    cp = subprocess.run([sys.executable, "-m", "hjs_figures.cli", "render",
                         str(p), "--labels", "1", "--out", str(out)],
                        capture_output=True, text=True)
    assert cp.returncode == 0, cp.stderr
    assert (out.with_suffix(".png")).exists()
    assert (out.with_suffix(".svg")).exists()


def test_cli_render_spec_file(tmp_path):
    p = synthetic_csv(tmp_path / "s.csv", 1.0)
    spec = {"inputs": [str(p)], "labels": ["kappa=1"],
            "output": str(tmp_path / "fig"), "panels": "momentum"}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    cp = subprocess.run([sys.executable, "-m", "hjs_figures.cli", "render",
                         "--spec", str(spec_path)],
                        capture_output=True, text=True)
    assert cp.returncode == 0, cp.stderr
    assert (tmp_path / "fig.png").exists()


def test_cli_schema_error_exit_2(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    cp = subprocess.run([sys.executable, "-m", "hjs_figures.cli", "render",
                         str(p), "--out", str(tmp_path / "f")],
                        capture_output=True, text=True)
    assert cp.returncode == 2
    assert "error" in cp.stderr


def test_acceptance_11_figure_from_real_sweep(tmp_path):
    # secondary acceptance: render from real solver output for kappa in
    # {0.5, 1, 2}; central curves identical, bands widen monotonically
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("scenario = kappa_sweep\nkappa_list = 0.5,1,2\ndt = 2e-3\n")
    out = tmp_path / "runs"
    cp = subprocess.run([sys.executable, "-m", "hjs_lab.cli", "run", str(cfg),
                         "--outdir", str(out)], capture_output=True, text=True)
    assert cp.returncode == 0, cp.stderr
    paths = [out / f"kappa_{k}" / "series.csv" for k in ("0.5", "1", "2")]
    series = [load_series(p) for p in paths]
    # identical central trajectories
    for s in series[1:]:
        assert np.abs(s["mean_q"] - series[0]["mean_q"]).max() < 1e-5
        assert np.abs(s["mean_p"] - series[0]["mean_p"]).max() < 1e-5
    # bands widen monotonically with kappa; at the rotation nodes
    # (sin t = 0 for q, cos t = 0 for p) all bands coincide exactly
    t = series[0]["t"]
    bq = [np.sqrt(s["var_q"]) for s in series]
    bp = [np.sqrt(s["var_p_op"]) for s in series]
    away_q = np.abs(np.sin(t)) > 0.05
    away_p = np.abs(np.cos(t)) > 0.05
    assert np.all(bq[0][away_q] < bq[1][away_q]) \
        and np.all(bq[1][away_q] < bq[2][away_q])
    assert np.all(bp[0][away_p] < bp[1][away_p]) \
        and np.all(bp[1][away_p] < bp[2][away_p])
    assert np.all(bq[0] <= bq[1] + 1e-9) and np.all(bq[1] <= bq[2] + 1e-9)
    assert np.all(bp[0] <= bp[1] + 1e-9) and np.all(bp[1] <= bp[2] + 1e-9)
    spec = FigureSpec(inputs=tuple(paths), labels=("0.5", "1", "2"),
                      output=tmp_path / "fig" / "ensemble")
    written = render(spec)
    assert all(w.exists() and w.stat().st_size > 1000 for w in written)
    print("[criterion 11] PASS - identical central curves across kappa; "
          "bands widen monotonically; PNG+SVG rendered")

import json

import numpy as np
import pytest

from momentkit import (Image, MethodSpec, MomentSet, OrderIndex, order_set,
                       read_moments, reconstruct, write_pgm)
from momentkit.cli import main
from momentkit.geometry import Scheme


def band_limited_image(tmp_path, N=128):
    """An image inside the ZM S(5) span whose content dies quadratically
    at the rim, so boundary-band discretisation effects stay tiny."""
    i = np.arange(1, N + 1)
    x = (2.0 * i - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    R2 = X * X + Y * Y
    f = (1 - R2) ** 2 * (0.70 + 0.15 * X + 0.10 * Y)
    f = np.where(R2 <= 1.0, f, 0.0)
    img = Image(np.clip(f, 0.0, 1.0).T)
    path = tmp_path / "band.pgm"
    write_pgm(img, path)
    return path


def test_decompose_reconstruct_idempotent(tmp_path):
    img_path = band_limited_image(tmp_path)
    m1 = tmp_path / "m1.json"
    out = tmp_path / "recon.pgm"
    m2 = tmp_path / "m2.json"
    base = ["--method", "zm", "--K", "5", "--mapping", "incircle",
            "--rule", "up:3", "--strategy", "recursive", "--boundary", "clip"]
    assert main(["decompose", *base, "-i", str(img_path), "-o", str(m1)]) == 0
    assert main(["reconstruct", "-i", str(m1), "--size", "128",
                 "-o", str(out)]) == 0
    assert main(["decompose", *base, "-i", str(out), "-o", str(m2)]) == 0
    a = read_moments(m1)
    b = read_moments(m2)
    worst = max(abs(a.coefficients[k] - b.coefficients[k])
                for k in a.coefficients)
    # projection idempotence up to the 8-bit pipeline floor: quantization
    # noise re-projects at ~1e-4 and the discrete Gram deviation scales
    # as N^-2, so a per-coefficient 1e-6 would need N ~ 1000 rasters
    assert worst < 5e-4


def test_features_row_count(tmp_path):
    img_path = band_limited_image(tmp_path)
    m1 = tmp_path / "m.json"
    main(["decompose", "--method", "pct", "--K", "3", "--mapping", "polar",
          "--rule", "gauss:5", "--strategy", "naive",
          "-i", str(img_path), "-o", str(m1)])
    fcsv = tmp_path / "f.csv"
    assert main(["features", "-i", str(m1), "-o", str(fcsv)]) == 0
    lines = fcsv.read_text().strip().split("\n")
    assert len(lines) - 1 == len(order_set(MethodSpec("PCT"), 3))


def test_unknown_method_exits_1_with_names(tmp_path, capsys):
    img_path = band_limited_image(tmp_path)
    rc = main(["decompose", "--method", "nope", "--K", "3",
               "-i", str(img_path), "-o", str(tmp_path / "x.json")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "ZM" in err and "GPST" in err


def test_usage_error_exits_1(capsys):
    assert main(["decompose", "--method", "zm"]) == 1  # missing required args


def test_missing_file_exits_2(tmp_path):
    rc = main(["decompose", "--method", "zm", "--K", "2",
               "-i", str(tmp_path / "absent.pgm"), "-o", str(tmp_path / "m.json")])
    assert rc == 2
    rc = main(["reconstruct", "-i", str(tmp_path / "absent.json"),
               "--size", "8", "-o", str(tmp_path / "y.pgm")])
    assert rc == 2


def test_classify_roundtrip(tmp_path):
    gal = tmp_path / "gallery"
    gal.mkdir()
    from momentkit.harness import gallery_image
    for i in range(3):
        write_pgm(gallery_image(32, i), gal / f"img{i}.pgm")
    from momentkit.invariants import rotate_image
    from momentkit.pgm import read_pgm
    query = tmp_path / "query.pgm"
    write_pgm(rotate_image(read_pgm(gal / "img1.pgm"), 90), query)
    import io
    from contextlib import redirect_stdout
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = main(["classify", "--gallery", str(gal), "--query", str(query),
                   "--method", "chfm", "--K", "6"])
    assert rc == 0
    assert buf.getvalue().strip() == "img1"


def test_bench_accuracy_csv_and_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "methods": [{"family": "ZM"}], "K_values": [2, 4], "N": 32,
        "image_source": "unity", "repeats": 1,
    }))
    out1 = tmp_path / "r1.csv"
    out2 = tmp_path / "r2.csv"
    assert main(["bench", "accuracy", "--config", str(cfg),
                 "-o", str(out1), "--json", str(tmp_path / "r1.json"),
                 "--no-plot"]) == 0
    assert main(["bench", "accuracy", "--config", str(cfg),
                 "-o", str(out2), "--no-plot"]) == 0

    def non_timing(path):
        return [l for l in path.read_text().splitlines() if ",DT," not in l]

    assert non_timing(out1) == non_timing(out2)
    data = json.loads((tmp_path / "r1.json").read_text())
    assert data["rows"]


def test_bench_plot_renders_figures(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "methods": [{"family": "PCT"}], "K_values": [2, 4], "N": 32,
        "image_source": "photo",
    }))
    out = tmp_path / "rec.csv"
    rc = main(["bench", "reconstruction", "--config", str(cfg),
               "-o", str(out), "--plot", str(tmp_path / "figs")])
    assert rc == 0
    figs = list((tmp_path / "figs").glob("*.png"))
    assert figs, "bench --plot should render figures next to the CSV"


def test_strict_mode_instability_exit_3(tmp_path, monkeypatch):
    img_path = band_limited_image(tmp_path, N=32)
    out = tmp_path / "m.json"
    import momentkit.cli as cli
    from momentkit import MomentSet, MethodSpec, OrderIndex, order_set

    def unstable_decompose(image, method, K, scheme=None, threads=1):
        coeffs = {k: complex(float("inf"), 0.0)
                  for k in order_set(method, K).indices}
        return MomentSet(method, K, Scheme(), coeffs, image.sha256())

    monkeypatch.setattr(cli, "decompose", unstable_decompose)
    monkeypatch.setenv("MOMENTKIT_STRICT", "1")
    rc = main(["decompose", "--method", "ofmm", "--K", "2",
               "-i", str(img_path), "-o", str(out)])
    assert rc == 3
    monkeypatch.setenv("MOMENTKIT_STRICT", "0")
    rc = main(["decompose", "--method", "ofmm", "--K", "2",
               "-i", str(img_path), "-o", str(out)])
    assert rc == 0

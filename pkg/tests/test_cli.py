import csv
import io

import numpy as np
import pytest
from PIL import Image

from efdmkit import cli
from efdmkit.images import quantize, read_image, write_png
from efdmkit.npyio import read_tensor, write_tensor
from efdmkit.stats import summarize


def synthetic_image(seed, h=48, w=64):
    """Smooth colour gradients plus noise, quantized to 8 bits."""
    r = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
    chans = []
    for _ in range(3):
        a, b, c = r.uniform(-200, 200, 3)
        chans.append(128 + a * xx + b * yy + c * xx * yy + r.normal(0, 12, (h, w)))
    return quantize(np.stack(chans, axis=-1))


@pytest.fixture
def imgs(tmp_path):
    paths = {}
    for name, seed, shape in (("content", 1, (48, 64)), ("style", 2, (48, 64)),
                              ("style2", 3, (48, 64)), ("big", 4, (60, 50))):
        p = tmp_path / f"{name}.png"
        write_png(p, synthetic_image(seed, *shape))
        paths[name] = p
    return paths


def run(argv, capsys):
    try:
        code = cli.main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def channel_counts(px):
    return [np.bincount(px[:, :, c].ravel(), minlength=256) for c in range(3)]


class TestImage:
    def test_self_transfer_identity(self, imgs, tmp_path, capsys):
        out = tmp_path / "o.png"
        code, _, _ = run(["image", imgs["content"], "--style", imgs["content"], "--out", out], capsys)
        assert code == 0
        assert np.array_equal(read_image(out), read_image(imgs["content"]))

    def test_histograms_equal_style(self, imgs, tmp_path, capsys):
        out = tmp_path / "o.png"
        code, text, _ = run(["image", imgs["content"], "--style", imgs["style"], "--out", out, "--csv"], capsys)
        assert code == 0
        o, s = read_image(out), read_image(imgs["style"])
        for a, b in zip(channel_counts(o), channel_counts(s)):
            assert np.array_equal(a, b)
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [float(r["ks_to_style"]) for r in rows] == [0.0, 0.0, 0.0]

    def test_efdmix_lambda_one(self, imgs, tmp_path, capsys):
        out = tmp_path / "o.png"
        code, _, _ = run(["image", imgs["content"], "--style", imgs["style"], "--method", "efdmix",
                          "--lambda", "1", "--out", out], capsys)
        assert code == 0
        assert np.array_equal(read_image(out), read_image(imgs["content"]))

    def test_deterministic_bytes(self, imgs, tmp_path, capsys):
        outs = []
        for i in range(2):
            out = tmp_path / f"o{i}.png"
            run(["image", imgs["content"], "--style", f"{imgs['style']}:0.3", "--style", f"{imgs['style2']}:0.7",
                 "--tie-break", "random", "--seed", "5", "--out", out], capsys)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_resamples_different_size_style(self, imgs, tmp_path, capsys):
        out = tmp_path / "o.png"
        for method in ("efdm", "efdmix", "adain", "hm", "mean", "std"):
            code, _, err = run(["image", imgs["content"], "--style", imgs["big"], "--method", method,
                                "--lambda", "0.5", "--out", out], capsys)
            assert code == 0, err
            assert read_image(out).shape == (48, 64, 3)

    def test_reads_ppm(self, imgs, tmp_path, capsys):
        ppm = tmp_path / "s.ppm"
        Image.open(imgs["style"]).save(ppm)
        assert ppm.read_bytes()[:2] == b"P6"
        out = tmp_path / "o.png"
        code, _, _ = run(["image", imgs["content"], "--style", ppm, "--out", out], capsys)
        assert code == 0

    def test_errors(self, imgs, tmp_path, capsys):
        out = tmp_path / "o.png"
        code, _, err = run(["image", tmp_path / "missing.png", "--style", imgs["style"], "--out", out], capsys)
        assert code == 2 and "error" in err
        code, _, err = run(["image", imgs["content"], "--style", f"{imgs['style']}:0.5",
                            "--style", f"{imgs['style2']}:0.2", "--out", out], capsys)
        assert code == 3 and "sum to 1" in err
        code, _, _ = run(["image", imgs["content"], "--style", imgs["style"], "--method", "wct", "--out", out], capsys)
        assert code == 1


@pytest.fixture
def tensors(tmp_path):
    r = np.random.default_rng(0)
    X = r.normal(size=(2, 3, 8, 8))
    Y = r.exponential(2.0, size=(2, 3, 8, 8))
    write_tensor(tmp_path / "x.npy", X)
    write_tensor(tmp_path / "y.npy", Y)
    write_tensor(tmp_path / "ysmall.npy", Y[:, :, :4, :])
    return tmp_path / "x.npy", tmp_path / "y.npy", tmp_path / "ysmall.npy"


class TestTensor:
    def test_efdm_reports_zero_ks(self, tensors, tmp_path, capsys):
        x, y, _ = tensors
        out = tmp_path / "o.npy"
        code, text, _ = run(["tensor", x, y, "--out", out, "--csv"], capsys)
        assert code == 0
        rows = [r for r in csv.DictReader(io.StringIO(text)) if r["stage"] == "output"]
        assert len(rows) == 6 and all(float(r["ks_to_style"]) == 0.0 for r in rows)
        assert read_tensor(out).shape == (2, 3, 8, 8)

    def test_adain_keeps_content_skew(self, tensors, capsys):
        x, y, _ = tensors
        code, text, _ = run(["tensor", x, y, "--method", "adain", "--csv"], capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        X = read_tensor(x)
        for r in rows:
            if r["stage"] == "output":
                sx = summarize(X[int(r["b"]), int(r["c"])])
                style = next(s for s in rows if s["stage"] == "style" and s["b"] == r["b"] and s["c"] == r["c"])
                assert float(r["skewness"]) == pytest.approx(sx.skewness, abs=1e-9)
                assert abs(float(r["skewness"]) - float(style["skewness"])) > 0.1

    def test_shape_mismatch(self, tensors, tmp_path, capsys):
        x, _, ysmall = tensors
        code, _, err = run(["tensor", x, ysmall], capsys)
        assert code == 3 and "axis H" in err
        code, _, _ = run(["tensor", x, ysmall, "--resample", "--out", tmp_path / "o.npy"], capsys)
        assert code == 0

    def test_losses_and_plot(self, tensors, tmp_path, capsys):
        x, y, _ = tensors
        fig = tmp_path / "ecdf.png"
        code, text, _ = run(["tensor", x, y, "--omega", "10", "--plot", fig, "--csv"], capsys)
        assert code == 0
        loss = list(csv.DictReader(io.StringIO(text.split("\n\n")[1])))[0]
        # EFDM output is its own style target
        assert float(loss["style_loss"]) == 0.0
        assert float(loss["total_loss"]) == pytest.approx(float(loss["content_loss"]))
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_bad_file(self, tensors, tmp_path, capsys):
        bad = tmp_path / "bad.npy"
        bad.write_bytes(b"not numpy")
        code, _, err = run(["tensor", bad, tensors[1]], capsys)
        assert code == 3 and "magic" in err


class TestStats:
    def test_image_equivalent_percent(self, imgs, capsys):
        code, text, _ = run(["stats", imgs["content"], "--csv"], capsys)
        assert code == 0
        summary, hist = text.split("\n\n")
        rows = list(csv.DictReader(io.StringIO(summary)))
        assert [r["channel"] for r in rows] == ["R", "G", "B"]
        assert all(float(r["equivalent_percent"]) > 90 for r in rows)
        hrows = list(csv.DictReader(io.StringIO(hist)))
        assert len(hrows) == 3 * 64
        assert sum(int(r["count"]) for r in hrows if r["channel"] == "R") == 48 * 64

    def test_constant_and_distinct_tensors(self, tmp_path, capsys):
        write_tensor(tmp_path / "c.npy", np.full((1, 1, 4, 4), 2.5))
        write_tensor(tmp_path / "d.npy", np.arange(16.0).reshape(1, 1, 4, 4))
        _, text, _ = run(["stats", tmp_path / "c.npy", "--csv"], capsys)
        row = next(csv.DictReader(io.StringIO(text.split("\n\n")[0])))
        assert float(row["std"]) == 0.0 and float(row["equivalent_percent"]) == 100.0
        _, text, _ = run(["stats", tmp_path / "d.npy", "--csv"], capsys)
        row = next(csv.DictReader(io.StringIO(text.split("\n\n")[0])))
        assert float(row["equivalent_percent"]) == 0.0

    def test_text_table_and_plot(self, imgs, tmp_path, capsys):
        fig = tmp_path / "h.png"
        code, text, _ = run(["stats", imgs["content"], "--plot", fig], capsys)
        assert code == 0 and "equivalent_percent" in text.splitlines()[0]
        assert fig.stat().st_size > 0

    def test_invalid_input(self, tmp_path, capsys):
        p = tmp_path / "x.png"
        p.write_bytes(b"nope")
        code, _, _ = run(["stats", p], capsys)
        assert code == 2


class TestBench:
    def test_table(self, capsys, tmp_path):
        fig = tmp_path / "b.png"
        code, text, _ = run(["bench", "--n", 4096, "--methods", "efdm,hm,adain", "--csv", "--plot", fig], capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [r["method"] for r in rows] == ["efdm", "hm", "adain"]
        for r in rows:
            assert float(r["seconds"]) > 0 and int(r["runs"]) == 5
            assert float(r["throughput"]) == pytest.approx(4096 / float(r["seconds"]))
        assert fig.exists()

    @pytest.mark.parametrize("argv", [["--n", "100"], ["--runs", "2"], ["--methods", "efdm,bogus"]])
    def test_usage_errors(self, argv, capsys):
        code, _, _ = run(["bench", *argv], capsys)
        assert code == 1


def test_no_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_style_spec_parsing():
    assert cli.parse_style_spec("a.png:0.25") == ("a.png", 0.25)
    assert cli.parse_style_spec("a.png") == ("a.png", None)

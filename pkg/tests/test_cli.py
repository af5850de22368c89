import json
import math
import re
from pathlib import Path

import numpy as np
import pytest

from ccrcurves import fileio, sphere
from ccrcurves.cli import EXIT_INVALID, EXIT_OK, main
from ccrcurves.frenet import CurveSamples
from ccrcurves.numkit import ValidationError

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def field(out, name):
    m = re.search(rf"^{name}: (.*)$", out, re.M)
    assert m, f"no {name!r} line in output"
    return m.group(1)


def numbers(text):
    return [float(x) for x in re.findall(r"-?\d+\.?\d*(?:e[-+]?\d+)?", text)]


@pytest.fixture(scope="module")
def worked_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "worked.csv"
    assert main(["synthesize", str(SPECS / "spherical_r4.json"), "--out", str(path)]) == EXIT_OK
    return path


class TestEigen:
    def test_worked_ratios(self, capsys):
        code, out, _ = run(capsys, "eigen", "--ratios", "0.5,0.8660254")
        assert code == EXIT_OK
        assert field(out, "frequencies") == "0.70710678, 1.22474487"
        assert field(out, "twisted") == "true"
        assert "zero eigenvalue" not in out

    def test_three_dimensions(self, capsys):
        code, out, _ = run(capsys, "eigen", "--ratios", "1", "--dim", "3")
        assert code == EXIT_OK
        assert field(out, "frequencies") == "1.41421356"
        assert "zero eigenvalue: yes" in out

    def test_plane_circle(self, capsys):
        code, out, _ = run(capsys, "eigen")
        assert code == EXIT_OK and field(out, "frequencies") == "1.00000000"

    def test_digits(self, capsys):
        _, out, _ = run(capsys, "eigen", "--ratios", "1", "--digits", "12")
        assert field(out, "frequencies") == f"{math.sqrt(2):.12f}"

    @pytest.mark.parametrize("argv", [
        ["--ratios", "0"], ["--ratios", "0.5,x"], ["--ratios", "1", "--dim", "5"], ["--ratios", "nan"],
    ])
    def test_bad_input(self, capsys, argv):
        code, _, err = run(capsys, "eigen", *argv)
        assert code == EXIT_INVALID and err


class TestSynthesize:
    def test_worked_example(self, worked_csv):
        c = fileio.read_curve(worked_csv)
        assert c.n == 4
        assert np.abs(np.linalg.norm(c.points, axis=1) - 1).max() < 1e-6

    def test_circle(self, tmp_path, capsys):
        out = tmp_path / "circle.csv"
        code, text, _ = run(capsys, "synthesize", SPECS / "circle.json", "--out", out, "--steps", 500)
        assert code == EXIT_OK and "dimension 2, 501 samples" in text
        c = fileio.read_curve(out)
        assert np.allclose(np.linalg.norm(c.points, axis=1), 1, atol=1e-9)

    def test_stdout(self, capsys):
        code, out, err = run(capsys, "synthesize", SPECS / "circle.json", "--steps", 100)
        assert code == EXIT_OK and out.startswith("s,x1,x2\n") and "arc length" in err

    def test_domain_outside_profile(self, tmp_path, capsys):
        doc = json.loads((SPECS / "spherical_r4.json").read_text())
        doc["domain"] = [-0.6, 0.4]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc, indent=1))
        code, _, err = run(capsys, "synthesize", bad)
        assert code == EXIT_INVALID and "domain" in err

    def test_error_names_line(self, tmp_path, capsys):
        text = (SPECS / "circle.json").read_text().replace('"ratios": []', '"ratios": [1.0]')
        bad = tmp_path / "bad.json"
        bad.write_text(text)
        line = next(i for i, ln in enumerate(text.splitlines(), 1) if '"ratios"' in ln)
        code, _, err = run(capsys, "synthesize", bad)
        assert code == EXIT_INVALID and f"bad.json:{line}:" in err

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "dimension": 2,\n  oops\n}\n')
        code, _, err = run(capsys, "synthesize", bad)
        assert code == EXIT_INVALID and "bad.json:3:" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, "synthesize", tmp_path / "nope.json")
        assert code == EXIT_INVALID

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            run(capsys, "synthesize", SPECS / "helix_r3.json", "--out", p)
        assert a.read_bytes() == b.read_bytes()


class TestAnalyze:
    def test_worked_example(self, worked_csv, tmp_path, capsys):
        js = tmp_path / "report.json"
        code, out, _ = run(capsys, "analyze", worked_csv, "--json", js)
        assert code == EXIT_OK
        assert numbers(field(out, "ratios")) == pytest.approx([0.5, math.sqrt(3) / 2], abs=1e-4)
        assert field(out, "ccr") == "true" and field(out, "torus") == "true"
        doc = json.loads(js.read_text())
        assert doc["ccr"] and doc["torus"]
        assert np.sum(np.square(doc["radius_mean"])) == pytest.approx(1, abs=1e-8)

    def test_polynomial_curve(self, tmp_path, capsys):
        t = np.linspace(0.2, 1.2, 2000)
        path = tmp_path / "poly.csv"
        fileio.write_curve(path, CurveSamples(t, np.c_[t, t**2, t**3, t**4]))
        code, out, _ = run(capsys, "analyze", path)
        assert code == EXIT_OK and field(out, "ccr") == "false"

    def test_too_few_samples(self, tmp_path, capsys):
        t = np.linspace(0, 1, 10)
        path = tmp_path / "short.csv"
        fileio.write_curve(path, CurveSamples(t, np.c_[np.cos(t), np.sin(t)]))
        code, _, err = run(capsys, "analyze", path)
        assert code == EXIT_INVALID and err

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("s,x1,x2\n0,1,0\n0.1,1\n")
        code, _, err = run(capsys, "analyze", path)
        assert code == EXIT_INVALID and "bad.csv:3:" in err


class TestSphere:
    def test_worked_example(self, worked_csv, capsys):
        code, out, _ = run(capsys, "sphere", worked_csv)
        assert code == EXIT_OK
        assert np.allclose(numbers(field(out, "center")), 0, atol=1e-6)
        assert float(field(out, "radius")) == pytest.approx(1, abs=1e-6)
        assert field(out, "criterion") == "pass"

    def test_helix_r3_radius(self, tmp_path, capsys):
        t = np.linspace(-1.2, 1.2, 1500)
        path = tmp_path / "beta.csv"
        fileio.write_curve(path, CurveSamples(t, sphere.helix_r3(1.0, t)))
        code, out, _ = run(capsys, "sphere", path)
        assert code == EXIT_OK and float(field(out, "radius")) == pytest.approx(1, abs=1e-9)

    def test_off_unit_torus_fails(self, tmp_path, capsys):
        s = np.linspace(0, 15, 4000)
        pts = sphere.constant_curvature_curve(1.0, 1.0, math.sqrt(1.5), 1 / math.sqrt(2), s)
        path = tmp_path / "torus.csv"
        fileio.write_curve(path, CurveSamples(s, pts, arclength=True))
        code, out, _ = run(capsys, "sphere", path)
        assert code == EXIT_OK and field(out, "criterion") == "fail"

    def test_plane_curve_fit_only(self, tmp_path, capsys):
        run(capsys, "synthesize", SPECS / "circle.json", "--out", tmp_path / "c.csv")
        code, out, _ = run(capsys, "sphere", tmp_path / "c.csv")
        assert code == EXIT_OK and "not available in dimension 2" in out


class TestPlotdata:
    def test_circle_projection(self, tmp_path, capsys):
        run(capsys, "synthesize", SPECS / "circle.json", "--out", tmp_path / "c.csv", "--steps", 200)
        code, out, _ = run(capsys, "plotdata", tmp_path / "c.csv", "--coords", "1,2")
        assert code == EXIT_OK
        rows = out.splitlines()
        assert rows[0] == "x1,x2"
        xy = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        src = fileio.read_curve(tmp_path / "c.csv").points
        assert np.array_equal(xy, src)

    def test_helix_projection_to_file(self, tmp_path, capsys):
        t = np.linspace(-1, 1, 300)
        fileio.write_curve(tmp_path / "b.csv", CurveSamples(t, sphere.helix_r3(1.0, t)))
        code, _, _ = run(capsys, "plotdata", tmp_path / "b.csv", "--out", tmp_path / "xy.csv")
        assert code == EXIT_OK
        assert len((tmp_path / "xy.csv").read_text().splitlines()) == 301

    @pytest.mark.parametrize("coords", ["1,5", "0,1", "1", "a,b"])
    def test_bad_coords(self, worked_csv, capsys, coords):
        code, _, _ = run(capsys, "plotdata", worked_csv, "--coords", coords)
        assert code == EXIT_INVALID


class TestFormats:
    def test_curve_roundtrip_bit_identical(self, rng):
        s = np.linspace(-1, 1, 64)
        c = CurveSamples(s, rng.normal(size=(64, 3)) * 10.0 ** rng.integers(-8, 8, size=(64, 1)))
        back = fileio.parse_curve(fileio.format_curve(c))
        assert np.array_equal(back.s, c.s) and np.array_equal(back.points, c.points)
        assert fileio.format_curve(back) == fileio.format_curve(c)

    def test_spec_roundtrip(self):
        spec, steps = fileio.read_spec(SPECS / "spherical_r4.json")
        text = fileio.format_spec(spec, steps)
        assert text == (SPECS / "spherical_r4.json").read_text()
        keys = [re.match(r'  "(\w+)": ', ln).group(1) for ln in text.splitlines()[1:-1]]
        assert keys == list(fileio.spec_document(spec, steps))

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="unknown key"):
            fileio.parse_spec('{"dimension": 2, "colour": 1}')

    @pytest.mark.parametrize("text", ["", "t,x1,x2\n0,1,1\n1,1,1\n", "s,x1\n0,1\n1,2\n"])
    def test_bad_headers(self, text):
        with pytest.raises(ValidationError):
            fileio.parse_curve(text)

    def test_no_subcommand(self, capsys):
        assert main([]) == EXIT_INVALID
        assert main(["--help"]) == EXIT_OK

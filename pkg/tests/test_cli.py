import numpy as np
import pytest

from main import build_parser, load_config, main, multistatic_path
from output_utils import read_far_field, read_field_csv, read_multistatic

POINT_SCENE = "type = point\npoints = -2,0\n"
DISK_SCENE = "type = disk\ncenter = -1,0.5\nradius = 1.5\nbc = impedance\neta = 1i\n"
IMAGING_FLAGS = ["--nz", "8", "--N", "30", "--M", "80", "--nx", "12", "--ny", "10"]


@pytest.fixture
def point_data(tmp_path, write_text):
    scene = write_text("point.txt", POINT_SCENE)
    out = str(tmp_path / "u.csv")
    assert main(["synthesize", "--scene", scene, "--k", "6", "--ntheta", "128", "--out", out]) == 0
    return out


class TestParser:
    def test_flags_reach_config(self):
        args = build_parser().parse_args(["invert", "--data", "d.csv", "--out", "o.csv", "--R", "8", "--nx", "20"])
        cfg = load_config(args)
        assert cfg.imaging.R == 8.0
        assert cfg.imaging.resolved_grid().n_x == 20
        assert cfg.method == "scheme2"

    def test_config_file_then_flags(self, write_text):
        config = write_text("run.cfg", "# inversion settings\nk = 12\nR = 8\nM = 40\nalpha = 1e-8\n")
        args = build_parser().parse_args(
            ["invert", "--config", config, "--k", "6", "--data", "d.csv", "--out", "o.csv"]
        )
        cfg = load_config(args)
        assert (cfg.imaging.k, cfg.imaging.R, cfg.imaging.n_radii, cfg.imaging.alpha) == (6.0, 8.0, 40, 1e-8)

    def test_no_abbreviations(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["invert", "--dat", "d.csv"])

    def test_multistatic_path(self):
        assert multistatic_path("out/u.csv") == "out/u_multistatic.csv"


class TestSynthesize:
    def test_point_data(self, point_data, capsys):
        u = read_far_field(point_data)
        assert u.n_theta == 128
        np.testing.assert_allclose(np.abs(u.values), np.ones(128), atol=1e-13)

    def test_byte_deterministic(self, tmp_path, write_text):
        scene = write_text("disk.txt", DISK_SCENE)
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            argv = ["synthesize", "--scene", scene, "--ntheta", "64", "--noise", "0.03", "--seed", "4",
                    "--out", str(out)]
            assert main(argv) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_multistatic_output(self, tmp_path, write_text, capsys):
        scene = write_text("disk.txt", DISK_SCENE)
        out = tmp_path / "u.csv"
        assert main(["synthesize", "--scene", scene, "--ntheta", "32", "--multistatic", "--out", str(out)]) == 0
        k, matrix = read_multistatic(str(tmp_path / "u_multistatic.csv"))
        assert k == 6.0
        assert matrix.shape == (32, 32)
        assert "Multistatic matrix written" in capsys.readouterr().out

    def test_incident_angle_wrapped(self, tmp_path, write_text, capsys):
        scene = write_text("disk.txt", DISK_SCENE)
        out = tmp_path / "u.csv"
        assert main(["synthesize", "--scene", scene, "--ntheta", "32", "--incident=7.0", "--out", str(out)]) == 0
        assert "incident: 0.716815" in capsys.readouterr().out

    def test_source_has_no_multistatic(self, tmp_path, write_text, capsys):
        scene = write_text("tri.txt", "type = polygon-source\nvertices = -2,-2; 2,-2; -2,2\n")
        code = main(["synthesize", "--scene", scene, "--ntheta", "32", "--multistatic", "--out", str(tmp_path / "u")])
        assert code == 1
        assert "validation_error" in capsys.readouterr().err

    def test_bad_scene_line_reported(self, tmp_path, write_text, capsys):
        scene = write_text("bad.txt", "type = disk\nradius = -1\n")
        assert main(["synthesize", "--scene", scene, "--out", str(tmp_path / "u.csv")]) == 1
        assert "line 2" in capsys.readouterr().err

    def test_residual_failure_exit_code(self, tmp_path, write_text, capsys):
        scene = write_text("square.txt", "type = polygon-obstacle\nvertices = -3,-3; 3,-3; 3,3; -3,3\n")
        config = write_text("mfs.cfg", "n_charges = 12\nn_collocation = 24\nresidual_tol = 1e-6\n")
        argv = ["synthesize", "--config", config, "--scene", scene, "--k", "12", "--ntheta", "32",
                "--out", str(tmp_path / "u.csv")]
        assert main(argv) == 2
        assert "numerical_error" in capsys.readouterr().err

    def test_missing_scene(self, tmp_path):
        assert main(["synthesize", "--out", str(tmp_path / "u.csv")]) == 1


class TestInvert:
    @pytest.mark.parametrize("method", ["scheme2", "esm"])
    def test_field_outputs(self, point_data, tmp_path, method):
        out = tmp_path / f"{method}.csv"
        assert main(["invert", "--data", point_data, "--method", method, "--out", str(out)] + IMAGING_FLAGS) == 0
        field = read_field_csv(str(out))
        assert field.values.shape == (10, 12)
        image = (tmp_path / f"{method}.pgm").read_text().splitlines()
        assert image[:3] == ["P2", "12 10", "255"]

    def test_scheme_one(self, point_data, tmp_path, capsys):
        out = tmp_path / "s1.csv"
        assert main(["invert", "--data", point_data, "--method", "scheme1", "--out", str(out)] + IMAGING_FLAGS) == 0
        assert len(out.read_text().splitlines()) == 9
        assert (tmp_path / "s1.pgm").is_file()
        assert "radii" in capsys.readouterr().out

    def test_profile(self, point_data, tmp_path, capsys):
        out = tmp_path / "profile.csv"
        argv = ["invert", "--data", point_data, "--method", "profile", "--center", "4,0", "--N", "40",
                "--out", str(out)]
        assert main(argv) == 0
        assert len(out.read_text().splitlines()) == 161
        assert "threshold_radius" in capsys.readouterr().out

    def test_classical(self, tmp_path, write_text):
        scene = write_text("disk.txt", DISK_SCENE)
        data = tmp_path / "u.csv"
        assert main(["synthesize", "--scene", scene, "--ntheta", "32", "--multistatic", "--out", str(data)]) == 0
        out = tmp_path / "classical.csv"
        argv = ["invert", "--data", str(tmp_path / "u_multistatic.csv"), "--method", "classical",
                "--classical", "fsharp", "--nx", "9", "--ny", "9", "--out", str(out)]
        assert main(argv) == 0
        assert read_field_csv(str(out)).values.shape == (9, 9)

    def test_classical_needs_matrix(self, point_data, tmp_path, capsys):
        code = main(["invert", "--data", point_data, "--method", "classical", "--out", str(tmp_path / "c.csv")])
        assert code == 1
        assert "multistatic" in capsys.readouterr().err

    def test_wavenumber_mismatch(self, point_data, tmp_path):
        assert main(["invert", "--data", point_data, "--k", "7", "--out", str(tmp_path / "x.csv")]) == 1

    def test_unknown_method(self, point_data, tmp_path):
        assert main(["invert", "--data", point_data, "--method", "music", "--out", str(tmp_path / "x.csv")]) == 1


class TestSpectrumAndSweep:
    def test_spectrum_to_stdout(self, capsys):
        assert main(["spectrum", "--k", "6", "--h", "1", "--N", "5", "--bc", "soundsoft"]) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0] == "n,re,im,abs"
        assert len(lines) == 12
        assert "Spectrum table written" in captured.err

    def test_spectrum_file(self, tmp_path):
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--N", "3", "--eta=-2+1i", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 8

    def test_sweep(self, tmp_path, write_text, capsys):
        scene = write_text("disk.txt", DISK_SCENE)
        data = tmp_path / "u.csv"
        assert main(["synthesize", "--scene", scene, "--ntheta", "256", "--out", str(data)]) == 0
        capsys.readouterr()
        argv = ["sweep", "--data", str(data), "--scene", scene, "--alphas", "1e-13,1e-10", "--nz", "16",
                "--N", "60", "--nx", "24", "--ny", "20"]
        assert main(argv) == 0
        captured = capsys.readouterr()
        rows = captured.out.splitlines()
        assert rows[0] == "alpha,interior_mean,exterior_mean,contrast"
        assert len(rows) == 3
        assert "best_alpha" in captured.err

    def test_sweep_needs_alphas(self, point_data, write_text):
        scene = write_text("point.txt", POINT_SCENE)
        assert main(["sweep", "--data", point_data, "--scene", scene]) == 1

import json
from pathlib import Path

import numpy as np
import pytest

from sfembloch import cli, output
from sfembloch.basis import EQUISPACED, GAUSS_LEGENDRE, GAUSS_LOBATTO, LOBATTO
from sfembloch.config import parse_config, parse_string
from sfembloch.elasticity import ALUMINUM, BRASS
from sfembloch.errors import ConfigurationError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MATERIALS = """
[material aluminum]
E = 7.31e10
nu = 0.325
rho = 2770

[material brass]
E = 9.2e10
nu = 0.33
rho = 8270
"""


def _cfg(cell, disc="", sweep="", out=""):
    text = MATERIALS + "\n[cell]\n" + cell
    for name, body in (("discretization", disc), ("sweep", sweep), ("output", out)):
        if body:
            text += f"\n[{name}]\n{body}"
    return text


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config_defaults():
    cfg = parse_string(_cfg("layout = homogeneous\nmaterial = aluminum\n"))
    assert (cfg.element, cfg.nx, cfg.ny) == (8, 1, 1)
    assert cfg.node_family == LOBATTO and cfg.quadrature == GAUSS_LOBATTO
    assert cfg.lumping_mode is None
    assert (cfg.path, cfg.samples, cfg.n_modes) == ("GY", 30, 10)
    assert cfg.element_spec().is_spectral and cfg.element_spec().nodes_per_side == 8
    assert cfg.cell().layout.material == ALUMINUM


def test_materials_round_trip_through_echo():
    cfg = parse_string(_cfg("layout = bilayer\nbottom = aluminum\ntop = brass\n", "ny = 2\n"))
    assert cfg.materials["aluminum"] == ALUMINUM
    assert cfg.materials["brass"] == BRASS
    again = parse_string(cfg.to_ini())
    assert again == cfg
    assert again.digest == cfg.digest


def test_classical_defaults_to_gauss_legendre():
    cfg = parse_string(_cfg("material = aluminum\n", "node_family = equispaced\norder = 4\n"))
    assert cfg.quadrature == GAUSS_LEGENDRE and cfg.node_family == EQUISPACED
    assert cfg.element == 5 and not cfg.element_spec().is_spectral


@pytest.mark.parametrize("cell, disc, key", [
    ("layout = bilayer\nbottom = aluminum\ntop = brass\n", "ny = 3\n", "discretization.ny"),
    ("material = aluminum\n", "quadrature = gauss_legendre\n", "discretization.quadrature"),
    ("material = aluminum\n", "node_family = chebyshev\nquadrature = gauss_lobatto\n",
     "discretization.quadrature"),
    ("material = steel\n", "", "cell.material"),
    ("layout = inclusion\nmatrix = aluminum\ninclusion = brass\n", "nx = 3\nny = 4\n", "discretization.nx"),
    ("material = aluminum\nd_a = -1\n", "", "cell.d_a"),
    ("material = aluminum\ncolour = red\n", "", "cell.colour"),
    ("layout = hexagonal\n", "", "cell.layout"),
    ("material = aluminum\n", "element = 8\norder = 7\n", "discretization.order"),
    ("material = aluminum\n", "lumping = rowsum\n", "discretization.lumping"),
])
def test_rejected_configs(cell, disc, key):
    with pytest.raises(ConfigurationError) as info:
        parse_string(_cfg(cell, disc))
    assert info.value.key == key
    assert key in str(info.value)


def test_bad_sweep_and_output():
    with pytest.raises(ConfigurationError, match="sweep.path"):
        parse_string(_cfg("material = aluminum\n", sweep="path = GQ\n"))
    with pytest.raises(ConfigurationError, match="output.formats"):
        parse_string(_cfg("material = aluminum\n", out="formats = csv, png\n"))
    with pytest.raises(ConfigurationError, match="unknown section"):
        parse_string(_cfg("material = aluminum\n") + "\n[solver]\nx = 1\n")
    with pytest.raises(ConfigurationError, match="missing"):
        parse_string(MATERIALS)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.ini")))
def test_shipped_configs_parse(name):
    cfg = parse_config(CONFIGS / name)
    cfg.cell()
    cfg.element_spec()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        parse_config(tmp_path / "nope.ini")


SMALL = _cfg("layout = bilayer\nbottom = aluminum\ntop = brass\nd_a = 0.1\n",
             "element = 5\nny = 2\n", "samples = 4\nn_modes = 5\n")


def test_dispersion_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL)
    out = tmp_path / "out"
    assert cli.main(["dispersion", "--config", str(cfg), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["dispersion.csv", "summary.json"]
    text = (out / "dispersion.csv").read_text()
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body[0] == ",".join(output.COLUMNS)
    assert len(body) == 1 + 4 * 5
    assert "# c_ref = " in text and "# L_ref = 2.0" in text
    summary = json.loads((out / "summary.json").read_text())
    assert summary["normalization"]["L_ref"] == 2.0
    assert summary["oracle"]["kind"] == "residual"
    assert parse_string(summary["config"]).digest == summary["config_hash"]

    res = output.read_csv(out / "dispersion.csv")
    direct = cli.run_dispersion(parse_config(cfg))
    assert res.omegas.tobytes() == direct.omegas.tobytes()
    np.testing.assert_array_equal(res.kpoints, direct.kpoints)
    assert res.c_ref == direct.c_ref and res.meta == direct.meta


def test_outputs_are_reproducible(tmp_path):
    cfg = _write(tmp_path, SMALL)
    for run in ("a", "b"):
        assert cli.main(["dispersion", "--config", str(cfg), "--out", str(tmp_path / run), "--svg"]) == 0
    for name in ("dispersion.csv", "summary.json", "dispersion.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_threads_do_not_change_output(tmp_path, monkeypatch):
    cfg = _write(tmp_path, SMALL)
    cli.main(["dispersion", "--config", str(cfg), "--out", str(tmp_path / "one")])
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    cli.main(["dispersion", "--config", str(cfg), "--out", str(tmp_path / "env")])
    cli.main(["dispersion", "--config", str(cfg), "--out", str(tmp_path / "flag"), "--threads", "2"])
    ref = (tmp_path / "one" / "dispersion.csv").read_bytes()
    assert (tmp_path / "env" / "dispersion.csv").read_bytes() == ref
    assert (tmp_path / "flag" / "dispersion.csv").read_bytes() == ref


def test_bad_thread_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    assert cli.main(["dispersion", "--config", str(_write(tmp_path, SMALL))]) == 2
    assert cli.THREADS_ENV in capsys.readouterr().err


def test_compare_bilayer(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL)
    assert cli.main(["compare", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    printed = capsys.readouterr().out
    lines = printed.strip().splitlines()
    assert lines[1].startswith("branch,max_Rayleigh_residual")
    assert len(lines) == 2 + 5
    assert float(lines[2].split(",")[1]) < 1e-4
    data = json.loads((tmp_path / "compare.json").read_text())
    assert data["kind"] == "residual" and len(data["branch_max"]) == 5


def test_compare_without_oracle_fails(tmp_path, capsys):
    cfg = _write(tmp_path, _cfg("layout = pore\nmatrix = aluminum\n", "element = 3\nnx = 4\nny = 4\n",
                                "samples = 2\n"))
    assert cli.main(["compare", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "oracle" in capsys.readouterr().err


def test_analytic_bilayer(tmp_path):
    cfg = _write(tmp_path, SMALL)
    assert cli.main(["analytic", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    gaps = json.loads((tmp_path / "analytic_gaps.json").read_text())["gaps"]
    shear = [g for g in gaps if g["wave"] == "S"]
    assert shear[0]["omega_lo"] == pytest.approx(3123.7411774577204, rel=1e-9)
    header = (tmp_path / "analytic.csv").read_text().splitlines()[0]
    assert header == "wave,segment,k,omega"


def test_analytic_homogeneous(tmp_path):
    cfg = _write(tmp_path, _cfg("material = aluminum\n", sweep="samples = 5\n"))
    assert cli.main(["analytic", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "analytic.csv").read_text().splitlines()
    assert rows[0] == "speed,n,m,k,omega"
    assert (len(rows) - 1) % 5 == 0


def test_runge_command(capsys):
    assert cli.main(["runge"]) == 0
    rows = dict(line.split(",") for line in capsys.readouterr().out.strip().splitlines()[1:])
    assert float(rows["equispaced"]) > 1.0
    assert float(rows["chebyshev"]) < 0.2 and float(rows["lobatto"]) < 0.2


def test_quadcheck_command(capsys):
    assert cli.main(["quadcheck"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    assert len(lines) == 18
    for line in lines:
        rule, n, ok, fail, err = line.split(",")
        n, ok, fail = int(n), int(ok), int(fail)
        assert ok == (2 * n - 3 if rule == "gauss_lobatto" else 2 * n - 1)
        assert fail == ok + 1 and float(err) > 1e-6


def test_error_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, _cfg("layout = bilayer\nbottom = aluminum\ntop = brass\n", "ny = 3\n"))
    assert cli.main(["dispersion", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "discretization.ny" in err


def test_config_required():
    with pytest.raises(SystemExit) as info:
        cli.main(["dispersion"])
    assert info.value.code == 2

import json

import pytest

from lacunary.cli import emit_plotdata, main, read_plotdata, run_preset
from lacunary.config import ConfigError, ExperimentConfig
from lacunary.sampling import SamplerConfig
from lacunary.sequences import gen_pow2, read_lacuseq
from lacunary.tailprob import TailScan, tail_scan
from lacunary.dilated import TrigPolynomial

COS = TrigPolynomial.parse("cos:1=1")


def _scan(ts):
    return tail_scan(gen_pow2(16), COS, 16, ts, SamplerConfig(seed=5, strata_bits=8))


def test_plotdata_empty_is_header_only():
    empty = TailScan([], [], [], [], [], [], [], samples=0, seed=5, normalization=1.0)
    lines = emit_plotdata(empty).splitlines()
    assert len(lines) == 2 and lines[0].startswith("# ") and lines[1].startswith("t\t")
    assert read_plotdata(emit_plotdata(empty)) == empty


def test_plotdata_single_row_and_round_trip(tmp_path):
    one = _scan([1.0])
    assert len(emit_plotdata(one).splitlines()) == 3
    many = _scan([0.0, 0.5, 1.5, 2.5])
    path = tmp_path / "p.tsv"
    emit_plotdata(many, path)
    assert read_plotdata(path.read_text()) == many


def test_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "clt-pow2", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"sampler": {"sede": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "nope"})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["preset", "clt-pow2", "--config", str(bad), "--seed", "1"]) == 2


def test_seed_is_mandatory(tmp_path, capsys):
    rc = main(["tail-scan", "--sequence", "pow2", "--N", "16", "--out", str(tmp_path / "s.csv")])
    assert rc == 2
    assert "seed" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        run_preset("clt-pow2", ExperimentConfig(), tmp_path)


def test_gen_and_census(tmp_path, capsys):
    out = tmp_path / "seq.txt"
    assert main(["gen", "--sequence", "erdos-fortet:12", "--out", str(out)]) == 0
    assert read_lacuseq(out).terms[-1] == 4095
    assert main(["census", "--sequence", "erdos-fortet", "--N", "10,20", "--pairs", "1:2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,a,b,L,witness_c,g_N,L_times_g_over_N"
    assert lines[1].startswith("10,1,2,9,1") and lines[2].startswith("20,1,2,19,1")


def test_construct_certifies(tmp_path):
    out = tmp_path / "tb.lacuseq"
    assert main(["construct", "--growth", "sqrt", "--I", "1", "--out", str(out)]) == 0
    report = json.loads(out.with_suffix(".json").read_text())
    assert report["checks_passed"] and report["ratios"]["burn_in"] == 7


def test_config_file_and_flag_override(tmp_path):
    cfg = {"sequence": "pow2", "N": [32], "steps": 4, "sampler": {"seed": 3, "samples": 4096}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    assert main(["tail-scan", "--config", str(path), "--out", str(a)]) == 0
    assert main(["tail-scan", "--config", str(path), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["tail-scan", "--config", str(path), "--seed", "4", "--out", str(c)]) == 0
    assert c.read_bytes() != a.read_bytes()
    assert a.with_suffix(".json").exists() and a.with_suffix(".tsv").exists()


def test_preset_manifest(tmp_path):
    rc = main(["preset", "clt-pow2", "--seed", "11", "--samples", "65536", "--out", str(tmp_path)])
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["preset"] == "clt-pow2"
    assert man["claim"] and man["tolerances"]["ks_last_max"] == 0.05
    assert set(man["outputs"]) == {"ks.csv", "manifest.json"}
    assert all((tmp_path / o).exists() for o in man["outputs"])
    assert rc == (0 if man["passed"] else 1)


def test_martingale_subcommand(tmp_path):
    out = tmp_path / "m.json"
    rc = main(["martingale", "--sequence", "pow2", "--N", "48", "--undashed", "8", "--dashed", "4",
               "--margin", "8", "--samples", "256", "--seed", "1", "--out", str(out)])
    assert rc == 0
    d = json.loads(out.read_text())
    assert d["max_cond_mean"] <= 1e-9 and d["plan"]["margin_bits"] == 8.0

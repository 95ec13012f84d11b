import subprocess
import sys

import pytest

from labelforest.cli import main
from labelforest.graph import parse_forest


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def label_lines(out: str) -> list[tuple[int, str]]:
    rows = []
    for line in out.splitlines():
        if line and not line.startswith("#"):
            u, lab = line.split("\t")
            rows.append((int(u), lab))
    return rows


@pytest.fixture
def star_file(tmp_path):
    p = tmp_path / "star.txt"
    p.write_text("5\n0 1\n0 2\n0 3\n0 4\n")
    return str(p)


def test_gen_encode_pipeline():
    gen = subprocess.run([sys.executable, "-m", "labelforest", "gen", "--family", "star", "--n", "5"],
                         capture_output=True, text=True, check=True)
    enc = subprocess.run([sys.executable, "-m", "labelforest", "encode", "--scheme", "tree"],
                         input=gen.stdout, capture_output=True, text=True, check=True)
    assert len(label_lines(enc.stdout)) == 5
    assert "# stats:" in enc.stdout


def test_gen_output_parses(capsys):
    code, out, _ = run(capsys, "gen", "--family", "uniform-prufer", "--n", "20", "--seed", "3")
    assert code == 0 and parse_forest(out).n == 20
    assert run(capsys, "gen", "--family", "uniform-prufer", "--n", "20", "--seed", "3")[1] == out


@pytest.mark.parametrize("scheme", ["tree", "caterpillar"])
def test_decode_pair_matches_oracle(capsys, star_file, scheme):
    code, out, _ = run(capsys, "encode", "--scheme", scheme, star_file)
    assert code == 0
    labels = dict(label_lines(out))
    f = parse_forest(open(star_file).read())
    for u in range(5):
        for v in range(5):
            _, ans, _ = run(capsys, "decode-pair", "--scheme", scheme, labels[u], labels[v])
            assert ans.strip() == ("true" if (min(u, v), max(u, v)) in f.edge_set else "false")


def test_decode_pair_accepts_hex(capsys):
    code, out, _ = run(capsys, "decode-pair", "x", "x0")
    assert code == 0 and out.strip() == "false"


def test_decode_pair_bad_bits(capsys):
    code, _, err = run(capsys, "decode-pair", "012", "1")
    assert code == 2 and "not a bit string" in err


def test_encode_rejects_cycle(capsys, tmp_path):
    p = tmp_path / "cycle.txt"
    p.write_text("3\n0 1\n1 2\n2 0\n")
    code, _, err = run(capsys, "encode", str(p))
    assert code == 2 and "cycle" in err


def test_encode_missing_file(capsys):
    code, _, err = run(capsys, "encode", "/nonexistent/forest.txt")
    assert code == 2 and "cannot read" in err


def test_caterpillar_encode_rejects_spider(capsys, tmp_path):
    p = tmp_path / "spider.txt"
    p.write_text("7\n0 1\n1 2\n0 3\n3 4\n0 5\n5 6\n")
    code, _, err = run(capsys, "encode", "--scheme", "caterpillar", str(p))
    assert code == 2 and "not a caterpillar" in err


def test_stats_table(capsys, star_file):
    code, out, _ = run(capsys, "stats", star_file)
    assert code == 0
    assert "node\tsize\tlightSize\tapex\tgamma\twc\trld" in out
    assert "# excess:" in out


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "--seeds", "0", "--exhaustive-max-n", "3", "--sizes", "50",
                       "--families", "path", "star")
    assert code == 0 and out.startswith("# seeds: 0")


def test_verify_config_file(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{"seeds": [4], "exhaustive_max_n": 3, "random_sizes": [30], "codec_samples": 10, '
                 '"fuzz_pairs": 10, "universal_max_n": 2}')
    code, out, _ = run(capsys, "verify", "--config", str(p))
    assert code == 0 and out.startswith("# seeds: 4")


def test_verify_config_without_seeds(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{"exhaustive_max_n": 3}')
    code, _, err = run(capsys, "verify", "--config", str(p))
    assert code == 2 and "seeds" in err


def test_verify_failure_exit_code(capsys, monkeypatch):
    from labelforest import harness

    from .test_harness import decoder_without_rld_check
    monkeypatch.setattr(harness, "decode_adjacent", decoder_without_rld_check)
    code, out, _ = run(capsys, "verify", "--seeds", "0", "--exhaustive-max-n", "7", "--sizes", "50",
                       "--families", "path")
    assert code == 1
    assert "decoded wrongly" in out


def test_universal_is_stable(capsys):
    code, first, _ = run(capsys, "universal", "--n", "4")
    assert code == 0 and "# vertices:" in first
    assert run(capsys, "universal", "--n", "4")[1] == first


def test_universal_size_cap(capsys):
    assert run(capsys, "universal", "--n", "12")[0] == 2


def test_arbor_round_trip(capsys, tmp_path):
    g = tmp_path / "k4.txt"
    g.write_text("4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    parts = tmp_path / "parts.txt"
    parts.write_text("0 1 0\n1 2 0\n2 3 0\n0 2 1\n0 3 1\n1 3 1\n")
    code, out, _ = run(capsys, "arbor", "encode", str(g), "--parts", str(parts))
    assert code == 0 and out.startswith("# forests: 2")
    labels = dict(label_lines(out))
    for u in range(4):
        for v in range(u + 1, 4):
            assert run(capsys, "arbor", "decode", labels[u], labels[v])[1].strip() == "true"


def test_arbor_greedy_and_bad_partition(capsys, tmp_path):
    g = tmp_path / "k4.txt"
    g.write_text("4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    code, out, _ = run(capsys, "arbor", "encode", str(g))
    assert code == 0 and out.startswith("# forests: 3")
    parts = tmp_path / "parts.txt"
    parts.write_text("0 1 0\n1 2 0\n0 2 0\n2 3 1\n0 3 1\n1 3 1\n")
    code, _, err = run(capsys, "arbor", "encode", str(g), "--parts", str(parts))
    assert code == 2 and "cycle" in err


def test_arbor_decode_needs_two_labels(capsys):
    assert run(capsys, "arbor", "decode", "1")[0] == 2


def test_bench_empty(capsys):
    code, out, _ = run(capsys, "bench", "--sizes")
    assert code == 0 and out.splitlines()[-1].startswith("n\t")


def test_bench_size_cap(capsys):
    assert run(capsys, "bench", "--sizes", "1000", "--max-n", "10")[0] == 2


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2

import io
import json
import subprocess
import sys

import pytest

from otsl.cli import EXIT_DATA, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from otsl.lang import Mode, tokenize, validate
from otsl.repair import read_candidates

from synthetic import MALFORMED, corpus, write_lines


@pytest.fixture
def run(capsys, monkeypatch):
    def _run(*argv, stdin=""):
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return _run


@pytest.mark.parametrize(
    "text,flags,code",
    [
        ("C NL", [], EXIT_OK),
        ("C L NL U C NL", ["--strict"], EXIT_INVALID),
        ("C L NL U C NL", [], EXIT_OK),
        ("C NL\nL NL", [], EXIT_INVALID),
        ("C Q NL", [], EXIT_INVALID),
        ("C C", [], EXIT_INVALID),
    ],
)
def test_validate_exit_codes(run, text, flags, code):
    assert run("validate", *flags, stdin=text)[0] == code


def test_validate_json(run):
    code, out, _ = run("validate", "--strict", "--json", stdin="C NL\n\nC L NL U C NL\n")
    first, second = (json.loads(line) for line in out.splitlines())
    assert first == {"line": 1, "valid": True, "rule": None, "position": None}
    assert second == {"line": 3, "valid": False, "rule": "S7_span_shape", "position": [1, 1]}
    assert code == EXIT_INVALID


def test_validate_unreadable(run, tmp_path):
    assert run("validate", str(tmp_path / "absent.txt"))[0] == EXIT_IO


@pytest.mark.parametrize(
    "otsl,html",
    [
        ("C NL", "<table><tr><td></td></tr></table>"),
        ("C L NL U X NL", '<table><tr><td rowspan="2" colspan="2"></td></tr><tr></tr></table>'),
    ],
)
def test_convert_examples(run, otsl, html):
    assert run("convert", "--from", "otsl", "--to", "html", stdin=otsl) == (EXIT_OK, html + "\n", "")
    assert run("convert", "--from", "html", "--to", "otsl", stdin=html) == (EXIT_OK, otsl + "\n", "")


def test_convert_html_round_trip_is_byte_identical(run):
    html = '<table><tr><td colspan="2"></td><td rowspan="2"></td></tr><tr><td></td><td></td></tr></table>\n'
    _, otsl, _ = run("convert", "--from", "html", "--to", "otsl", stdin=html)
    assert otsl == "C L C NL C C U NL\n"
    assert run("convert", "--from", "otsl", "--to", "html", stdin=otsl)[1] == html


def test_convert_errors(run, tmp_path):
    code, out, err = run("convert", "--from", "otsl", "--to", "html", stdin="C NL\nU NL\nC C NL\n")
    assert code == EXIT_DATA
    assert out.count("\n") == 2
    assert "line 2" in err
    assert run("convert", "--from", "otsl", "--to", "otsl", stdin="C NL")[0] == EXIT_USAGE
    out_path = tmp_path / "out.html"
    assert run("convert", "--from", "otsl", "--to", "html", "-o", str(out_path), stdin="C NL")[0] == EXIT_OK
    assert out_path.read_text() == "<table><tr><td></td></tr></table>\n"


def test_missing_required_flag_is_usage_error(run):
    with pytest.raises(SystemExit) as info:
        run("convert", "--from", "otsl")
    assert info.value.code == EXIT_USAGE


def test_repair_examples(run):
    assert run("repair", stdin="C L NL C C NL") == (EXIT_OK, "C L NL C C NL\n", "line 1: 0 substitution(s)\n")
    code, out, err = run("repair", stdin="X NL")
    assert (code, out) == (EXIT_OK, "C NL\n")
    assert "substituted X -> C at step 0" in err
    assert "1 substitution(s)" in err


def test_repair_candidates_from_simulator(run, tmp_path):
    cands = tmp_path / "steps.txt"
    table = tmp_path / "t.otsl"
    table.write_text("C L C NL U X C NL C C C NL\n")
    for seed in range(20):
        args = ["simulate", str(table), "--seed", str(seed), "--p-top1", "0.5", "--p-top2", "0.3", "-o", str(cands)]
        assert run(*args)[0] == EXIT_OK
        code, out, _ = run("repair", "--strict", "--candidates", str(cands))
        assert code == EXIT_OK
        validate(tokenize(out), Mode.STRICT)


def test_repair_truncated_candidates(run, tmp_path):
    table = tmp_path / "t.otsl"
    table.write_text("C C NL C C NL")
    cands = tmp_path / "steps.txt"
    run("simulate", str(table), "--drop-tail", "2", "-o", str(cands))
    assert len(read_candidates(cands.read_text().splitlines())) == 4
    code, out, _ = run("repair", "--candidates", str(cands), "--min-rows", "2")
    assert (code, out) == (EXIT_OK, "C C NL C C NL\n")


def test_repair_bad_candidates(run, tmp_path):
    cands = tmp_path / "steps.txt"
    cands.write_text("C:0.9\nC0.5\n")
    code, _, err = run("repair", "--candidates", str(cands))
    assert code == EXIT_DATA
    assert "line 2" in err


def test_simulate_is_deterministic(run, tmp_path):
    table = tmp_path / "t.otsl"
    table.write_text("C L NL U X NL")
    outs = {run("simulate", str(table), "--seed", "42", "--p-top1", "0.8", "--p-top2", "0.2")[1] for _ in range(3)}
    assert len(outs) == 1
    assert run("simulate", str(table), "--p-top1", "0.8", "--p-top2", "0.5")[0] == EXIT_USAGE
    assert run("simulate", stdin="L NL")[0] == EXIT_DATA


@pytest.mark.parametrize("rows,cols,count", [(2, 2, 8), (1, 3, 4), (3, 3, 322)])
def test_enumerate_count(run, rows, cols, count):
    assert run("enumerate", "--rows", str(rows), "--cols", str(cols), "--emit", "count") == (EXIT_OK, f"{count}\n", "")


def test_enumerate_emit(run):
    assert run("enumerate", "--rows", "1", "--cols", "1")[1] == "C NL\n"
    code, out, _ = run("enumerate", "--rows", "2", "--cols", "2")
    lines = out.splitlines()
    assert len(lines) == len(set(lines)) == 8
    for line in lines:
        validate(tokenize(line), Mode.STRICT)
    assert run("enumerate", "--rows", "5", "--cols", "5", "--emit", "count")[0] == EXIT_USAGE
    assert run("enumerate", "--rows", "0", "--cols", "2")[0] == EXIT_USAGE


def test_teds(run, tmp_path):
    two = tmp_path / "two.html"
    one = tmp_path / "one.html"
    bad = tmp_path / "bad.html"
    two.write_text("<table><tr><td></td><td></td></tr></table>")
    one.write_text("<table><tr><td></td></tr></table>")
    bad.write_text("<table><tr><td></tr></table>")
    assert run("teds", str(two), str(two)) == (EXIT_OK, "1.0\n", "")
    assert run("teds", str(two), str(one)) == (EXIT_OK, "0.75\n", "")
    assert run("teds", str(two), str(bad))[0] == EXIT_DATA
    assert run("teds", str(two), str(tmp_path / "absent.html"))[0] == EXIT_IO


def test_stats_pairs(run):
    pair = {"otsl": "C C NL C C NL", "html": "<tr><td></td><td></td></tr><tr><td></td><td></td></tr>"}
    code, out, _ = run("stats", "--input-format", "pairs", stdin=json.dumps(pair) + "\n")
    assert code == EXIT_OK
    assert "otsl_token,C,4" in out
    assert "otsl_length,6,1" in out and "html_length,12,1" in out
    assert out.splitlines()[-1].startswith("# ")
    assert "ratio=0.5" in out.splitlines()[-1]


def test_stats_empty(run):
    code, out, _ = run("stats", stdin="")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "kind,key,count"
    assert len(out.splitlines()) == 2


def test_stats_two_corpora(run, tmp_path):
    otsl = tmp_path / "a.otsl"
    html = tmp_path / "a.html"
    otsl.write_text("C NL\nC NL\n")
    html.write_text("<tr><td></td></tr>\n<table><tr><td>x</td></tr></table>\n")
    code, out, _ = run("stats", "--otsl", str(otsl), "--html", str(html))
    assert code == EXIT_OK
    summary = out.splitlines()[-1]
    assert "otsl_mean=2.0" in summary and "html_mean=4.0" in summary
    assert run("stats", "x.jsonl", "--otsl", str(otsl))[0] == EXIT_USAGE


def test_stats_from_ingest_output(run, tmp_path):
    write_lines(tmp_path / "in.jsonl", corpus(5))
    assert run("ingest", str(tmp_path / "in.jsonl"), str(tmp_path / "out.jsonl"))[0] == EXIT_OK
    code, out, _ = run("stats", str(tmp_path / "out.jsonl"))
    assert code == EXIT_OK
    code2, out2, _ = run("stats", "--input-format", "pubtabnet", str(tmp_path / "in.jsonl"))
    assert (code2, out2) == (code, out)


def test_ingest_examples(run, tmp_path):
    (tmp_path / "empty.jsonl").write_text("")
    code, out, _ = run("ingest", str(tmp_path / "empty.jsonl"), str(tmp_path / "o.jsonl"))
    assert (code, out) == (EXIT_OK, "0/0 converted, 0 skipped\n")

    write_lines(tmp_path / "two.jsonl", corpus(2))
    assert run("ingest", str(tmp_path / "two.jsonl"), str(tmp_path / "o.jsonl"))[0] == EXIT_OK
    assert len((tmp_path / "o.jsonl").read_text().splitlines()) == 2

    write_lines(tmp_path / "mixed.jsonl", corpus(4), MALFORMED)
    fail = tmp_path / "fail.jsonl"
    code, out, err = run("ingest", str(tmp_path / "mixed.jsonl"), str(tmp_path / "o.jsonl"), "--failures", str(fail))
    assert (code, out) == (EXIT_DATA, "4/7 converted, 3 skipped\n")
    assert len(fail.read_text().splitlines()) == 3
    assert "ragged.png" in err

    assert run("ingest", str(tmp_path / "absent.jsonl"), str(tmp_path / "o.jsonl"))[0] == EXIT_IO


def test_ingest_fintabnet(run, tmp_path):
    write_lines(tmp_path / "fin.jsonl", corpus(3, id_field="table_id"))
    assert run("ingest", "--format", "fintabnet", str(tmp_path / "fin.jsonl"), str(tmp_path / "o.jsonl"))[0] == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "otsl", "validate", "--strict"],
        input="C L NL U C NL\n",
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == EXIT_INVALID
    assert proc.stdout == "line 1: invalid S7_span_shape at (1, 1)\n"

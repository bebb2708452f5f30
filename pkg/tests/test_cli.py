import json
import subprocess
import sys


from oretile.cli import _ints, main, parse_args, read_keyvalue, render
from oretile.decomposition import minimal_L, synthetic_system
from oretile.graphs import Graph, complete_multipartite, format_digraph, format_graph, Digraph


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_chromatic_by_pattern(capsys):
    code, out = run(capsys, "chromatic", "K1,2,2")
    data = json.loads(out)
    assert code == 0
    assert (data["chi"], data["sigma"], data["chi_cr"]) == (3, 1, "5/2")


def test_tile_file_and_formats(capsys, tmp_path):
    g = write(tmp_path, "g.txt", format_graph(complete_multipartite([3, 3, 3])))
    code, out = run(capsys, "tile", g, "--pattern", "K3")
    assert code == 0 and json.loads(out)["count"] == 3
    code, out = run(capsys, "--format", "text", "tile", g, "--pattern", "K3", "--greedy")
    assert code == 0 and "count: 3" in out
    code, out = run(capsys, "tile", g, "--pattern", "K3", "--format", "csv")
    assert out.splitlines()[0] == "key,value"


def test_budget_exit_code(capsys, tmp_path):
    g = write(tmp_path, "g.txt", format_graph(Graph.complete(10)))
    code, out = run(capsys, "tile", g, "--pattern", "K3", "--budget", "1")
    assert code == 3 and json.loads(out)["error"] == "budget"


def test_precondition_exit_codes(capsys, tmp_path):
    code, out = run(capsys, "chromatic", "no-such-thing")
    assert code == 2 and json.loads(out)["error"] == "precondition"
    bad = write(tmp_path, "bad.json", "{not json")
    code, _ = run(capsys, "decompose", bad, "--alpha", "1/2", "--mu", "1/10", "-L", "10")
    assert code == 2
    code, _ = run(capsys, "sinkset", str(tmp_path / "missing.txt"))
    assert code == 2


def test_lemma_exit_code(capsys, tmp_path):
    # one k-clique cannot feed a small clique that needs 181 rounds
    L = minimal_L(3, 181, 360, [1])
    system = synthetic_system(3, {3: 1, 2: 2}, L)
    path = write(tmp_path, "sys.json", json.dumps(system.to_json()))
    code, out = run(capsys, "decompose", path, "--alpha", "1/2", "--mu", "1/10", "-L", str(L), "--relaxed")
    assert code == 4 and json.loads(out)["error"] == "lemma"


def test_decompose_ok(capsys, tmp_path):
    L = minimal_L(3, 181, 360, [1])
    path = write(tmp_path, "sys.json", json.dumps(synthetic_system(3, {3: 6, 2: 1}, L).to_json()))
    code, out = run(capsys, "decompose", path, "--alpha", "1/2", "--mu", "1/10", "-L", str(L))
    data = json.loads(out)
    assert code == 0 and data["residue"] == 0 and data["uniform"]


def test_bounds_and_cover(capsys, tmp_path):
    code, out = run(capsys, "bounds", "-k", "3", "--sigma", "1", "--omega", "2",
                    "--mu", "1/10", "--d", "1/1000", "--eps", "1/10000")
    assert code == 0 and json.loads(out)["leftover_constant"] == 230
    g = write(tmp_path, "g.txt", format_graph(complete_multipartite([2, 2, 2])))
    code, out = run(capsys, "cover", g, "-k", "3", "--exact", "--audit")
    data = json.loads(out)
    assert code == 0 and data["audit"]["passed"]


def test_sinkset(capsys, tmp_path):
    D = Digraph.from_arcs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    path = write(tmp_path, "d.txt", format_digraph(D))
    code, out = run(capsys, "sinkset", path)
    data = json.loads(out)
    assert code == 0 and data["sinks"] == [0, 3] and data["covers"] and data["bound"] == 3


def test_experiment_and_out(capsys, tmp_path):
    cfg = write(tmp_path, "exp.cfg", "# theorem run\nkind = theorem\npattern = K1,2\ngrid = 12..18:3\ntrials = 1\n")
    dest = tmp_path / "rep.csv"
    code, out = run(capsys, "--seed", "4", "experiment", cfg, "--format", "csv", "--out", str(dest))
    assert code == 0 and out == ""
    lines = dest.read_text().splitlines()
    assert lines[0].startswith("bound,") and len(lines) == 1 + 3 * 3


def test_extremal_flag(capsys, tmp_path):
    cfg = write(tmp_path, "x.cfg", "pattern = K1,2,2\nparts = 60 40 20\ninner_edges = 400\n")
    code, out = run(capsys, "experiment", cfg, "--extremal")
    assert code == 0 and json.loads(out)["uncovered"] <= 8


def test_global_flags_either_side_of_the_command():
    assert parse_args(["--seed", "4", "--format", "csv", "chromatic", "K3"]).format == "csv"
    args = parse_args(["chromatic", "K3", "--seed", "7"])
    assert (args.seed, args.format, args.out) == (7, "json", None)


def test_helpers(tmp_path):
    assert _ints("1..7:3") == [1, 4, 7] and _ints("[3, 5]") == [3, 5] and _ints("2..4") == [2, 3, 4]
    path = write(tmp_path, "c.cfg", 'a = 1  # note\nb = "x y"\n\n')
    assert read_keyvalue(path) == {"a": "1", "b": "x y"}
    assert render({"b": [1], "a": 2}, "text") == "a: 2\nb: [1]\n"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oretile", "chromatic", "C5"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["chi_cr"] == "5/2"
    proc = subprocess.run([sys.executable, "-m", "oretile", "chromatic"], capture_output=True, text=True)
    assert proc.returncode == 2

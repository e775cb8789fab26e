import json
import math

import pytest

from uptail.cli import emit_phase_diagram, run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out.strip()
    return code, json.loads(out) if out else None


class TestRate:
    def test_clique_inf(self, capsys):
        code, data = run_json(capsys, ["rate", "clique", "--r", "3",
                                       "--delta", "1", "--c", "inf"])
        assert code == 0
        assert math.isclose(data["phi"], 1 / 3) and data["argmins"] == [1.0]

    def test_clique_finite(self, capsys):
        code, data = run_json(capsys, ["rate", "clique", "--r", "3",
                                       "--delta", "1", "--c", "3"])
        assert code == 0 and math.isclose(data["phi"], 1 / 3)

    def test_regular(self, capsys):
        code, data = run_json(capsys, ["rate", "regular", "--pattern", "Bw",
                                       "--delta", "1", "--c", "inf"])
        assert code == 0
        assert math.isclose(data["theta"], 1 / 3, abs_tol=1e-9)
        assert math.isclose(data["rate"], 1 / 3, abs_tol=1e-9)

    def test_ap(self, capsys):
        code, data = run_json(capsys, ["rate", "ap", "--delta", "4"])
        assert code == 0 and math.isclose(data["localised_rate"], 2.0)


class TestPhi:
    def test_brute(self, capsys):
        code, data = run_json(capsys, ["phi", "brute", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--delta", "0.9"])
        assert code == 0
        assert len(data["payload"]["edges"]) == 2
        assert math.isclose(data["log_cost"], 2 * math.log(2))

    def test_subcube(self, capsys):
        code, data = run_json(capsys, ["phi", "subcube", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--delta", "0.9"])
        assert code == 0 and math.isclose(data["log_cost"], 2 * math.log(2))

    def test_construct_interval(self, capsys):
        code, data = run_json(capsys, ["phi", "construct", "--model", "ap",
                                       "--N", "100", "--k", "3", "--p", "1/10",
                                       "--kind", "interval", "--delta", "1"])
        assert code == 0 and data["payload"]["elements"] == [1, 2, 3, 4, 5]


class TestDistAndMoments:
    def test_dist_exact(self, capsys):
        code, data = run_json(capsys, ["dist", "exact", "--model", "triangles",
                                       "--n", "4", "--p", "1/2"])
        assert code == 0
        assert data == {"0": "41/64", "1": "1/4", "2": "3/32", "4": "1/64"}

    def test_moments(self, capsys):
        code, data = run_json(capsys, ["moments", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--tmax", "2"])
        assert code == 0
        assert data["from_dist"] == ["1/1", "1/2", "3/8"]
        assert data["from_tuples"] == data["from_dist"]


class TestCores:
    def test_extract(self, capsys):
        code, data = run_json(capsys, ["cores", "extract", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--s", "5/2",
                                       "--edges", "0-1,0-2,1-2,0-3"])
        assert code == 0 and data["edges"] == [[0, 1], [0, 2], [1, 2]]

    def test_enumerate(self, capsys):
        code, data = run_json(capsys, ["cores", "enumerate", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--delta", "1",
                                       "--eps", "0.2", "--K", "10", "--phi-plus", "2",
                                       "--m", "3"])
        assert code == 0 and data["count"] == len(data["witnesses"])


class TestMc:
    def test_sample(self, capsys):
        code, data = run_json(capsys, ["mc", "sample", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--delta", "1",
                                       "--samples", "20000", "--seed", "9"])
        assert code == 0
        assert abs(data["p_hat"] - 23 / 64) <= 4 * data["stderr"]

    def test_sample_reproducible(self, capsys):
        argv = ["mc", "sample", "--model", "triangles", "--n", "4", "--p", "1/2",
                "--delta", "1", "--samples", "5000", "--seed", "123"]
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_detect(self, capsys):
        from uptail.graphs import complete_graph, to_graph6
        code, data = run_json(capsys, ["mc", "detect", "--graph",
                                       to_graph6(complete_graph(8)),
                                       "--event", "clique", "--eps", "0.3",
                                       "--x", "1.0", "--p-real", "0.5", "--r", "3"])
        assert code == 0 and data["found"] and len(data["witness"]) == 8


class TestChecks:
    def test_extremal_ap_small(self, capsys):
        code, data = run_json(capsys, ["check", "extremal-ap", "--n", "10"])
        assert code == 0 and data["violations"] == 0

    def test_alpha_small(self, capsys):
        code, data = run_json(capsys, ["check", "alpha", "--max-n", "4",
                                       "--random", "50"])
        assert code == 0 and data["mismatches"] == 0

    def test_bounds_small(self, capsys):
        code, data = run_json(capsys, ["check", "bounds", "--pairs", "60",
                                       "--seed", "2"])
        assert code == 0 and data["violations"] == 0

    def test_stability(self, capsys):
        code, data = run_json(capsys, ["check", "stability", "--model", "triangles",
                                       "--n", "4", "--p", "1/2", "--delta", "1",
                                       "--eps", "0.2", "--ell", "2"])
        assert code == 0 and data["holds"]

    def test_janson(self, capsys):
        code, data = run_json(capsys, ["check", "janson", "--t", "5", "--s", "2",
                                       "--eps", "0.5"])
        assert code == 0 and data["holds"]


class TestPhaseDiagram:
    def test_row_count_and_header(self, tmp_path):
        out = tmp_path / "pd.csv"
        code = run(["phase-diagram", "--r", "3", "--delta-grid", "0.5:5:0.5",
                    "--c-grid", "1:10:1", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "delta,c,phi,argmin_label"
        assert len(lines) == 1 + 10 * 10

    def test_known_cell(self):
        text = emit_phase_diagram(3, [1.0], [3.0])
        row = text.splitlines()[1].split(",")
        assert math.isclose(float(row[2]), 1 / 3)
        assert row[3] == "hub"

    def test_large_delta_row_is_clique(self):
        # past the crossover the pure-clique cost wins for every finite c
        text = emit_phase_diagram(3, [4.0], [float(c) for c in range(1, 11)])
        labels = {line.split(",")[3] for line in text.splitlines()[1:]}
        assert labels == {"clique"}

    def test_deterministic(self):
        grid_d = [0.3 * i for i in range(1, 6)]
        grid_c = [0.7 * i for i in range(1, 6)]
        assert emit_phase_diagram(3, grid_d, grid_c) == \
            emit_phase_diagram(3, grid_d, grid_c)


class TestErrors:
    def test_unknown_verb(self):
        assert run(["nosuchverb"]) == 2

    def test_unknown_flag(self):
        assert run(["rate", "clique", "--r", "3", "--delta", "1",
                    "--c", "inf", "--bogus", "1"]) == 2

    def test_budget_exit_code(self):
        assert run(["dist", "exact", "--model", "ap", "--N", "23", "--k", "3",
                    "--p", "1/2"]) == 3

    def test_bad_p(self):
        assert run(["dist", "exact", "--model", "triangles", "--n", "4",
                    "--p", "3/2"]) == 2

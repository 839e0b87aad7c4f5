"""Command-line front end: artifacts, sweep table, determinism, exits.

Everything drives cli.main() in-process.  Determinism checks compare
emitted bytes across reruns and across --jobs settings; sweep content is
checked against the same classification the library performs directly,
so the CLI layer is plumbing under test, not the solver again.
"""

import json

import pytest

from kirchhoff_normalized import read_profile_csv
from kirchhoff_normalized.cli import (
    PHASE_COLUMNS,
    SpecError,
    SweepSpec,
    main,
    parse_axis,
    render_report,
)


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


FAST = ("--grid-size", "1200", "--restarts", "2")


class TestAxisParsing:
    def test_triple_is_inclusive(self):
        assert parse_axis("1:5:5") == (1.0, 2.0, 3.0, 4.0, 5.0)

    def test_count_one_collapses(self):
        assert parse_axis("2:9:1") == (2.0,)

    def test_comma_list(self):
        assert parse_axis("2.5, 2.8,3.0") == (2.5, 2.8, 3.0)

    @pytest.mark.parametrize("bad", ["", ",", "1:2", "1:2:0", "a,b", "1:x:3"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(SpecError):
            parse_axis(bad)


class TestThresholds:
    def test_emits_threshold_constants(self, capsys):
        rc, out, _ = run_cli(capsys, "thresholds", "--dim", "4", "--p", "3")
        assert rc == 0
        d = json.loads(out)
        assert d["c1_exact"] == pytest.approx(20.220462519940906, rel=1e-9)
        assert d["existence_ok"] is True

    def test_out_dir_mirrors_stdout(self, capsys, tmp_path):
        rc, out, _ = run_cli(capsys, "thresholds", "--dim", "5", "--p", "2.8",
                             "--out", str(tmp_path))
        assert rc == 0
        assert (tmp_path / "thresholds.json").read_text() == out


class TestGn:
    def test_profile_and_norms(self, capsys, tmp_path):
        rc, out, _ = run_cli(capsys, "gn", "--dim", "4", "--p", "3",
                             "--nodes", "1500", "--out", str(tmp_path))
        assert rc == 0
        norms = json.loads(out)
        assert norms == json.loads((tmp_path / "gn_norms.json").read_text())
        q = read_profile_csv(str(tmp_path / "gn_profile.csv"))
        assert q.mass() == pytest.approx(norms["mass"], rel=1e-12)
        assert norms["q_l2"] == pytest.approx(norms["mass"] ** 0.5, rel=1e-12)


class TestSolve:
    def test_minimizer_artifacts(self, capsys, tmp_path):
        rc, out, _ = run_cli(capsys, "solve", "--dim", "4", "--p", "2.5",
                             "--c", "1", *FAST, "--out", str(tmp_path))
        assert rc == 0
        d = json.loads(out)
        assert d["mode"] == "min"
        assert d["report"]["status"] == "converged_minimizer"
        assert d["report"]["candidate"]["lambda"] < 0
        u = read_profile_csv(str(tmp_path / "solve_profile.csv"))
        assert u.mass() == pytest.approx(1.0, rel=1e-8)

    def test_saddle_mode_reports_absence_honestly(self, capsys, tmp_path):
        # below the mass-critical threshold the fiber never descends
        rc, out, _ = run_cli(capsys, "solve", "--dim", "4", "--p", "3",
                             "--c", "10", "--mode", "mp", *FAST,
                             "--out", str(tmp_path))
        assert rc == 0
        d = json.loads(out)
        assert d["report"]["status"] == "no_nontrivial_solution_found"
        assert any("no saddle geometry" in n for n in d["report"]["notes"])
        assert not (tmp_path / "solve_profile.csv").exists()


class TestMoser:
    def test_margin_column_is_bound_minus_max(self, capsys):
        rc, out, _ = run_cli(capsys, "moser", "--n-list", "10,1e2")
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,max_g,argmax_t,bound,margin"
        assert len(lines) == 3
        for line in lines[1:]:
            n, max_g, _, bound, margin = line.split(",")
            assert int(n) in (10, 100)
            assert float(margin) == pytest.approx(
                float(bound) - float(max_g), abs=1e-9)


class TestSweep:
    def test_sign_change_straddles_the_threshold(self, capsys, tmp_path):
        # mass-critical N=4 with the quartic term above its floor: the
        # infimum estimate flips sign across c1 within grid resolution.
        # the spread minimizer lives on a widened grid, so this sweep
        # needs more cells than the other smoke runs or the balance
        # filter trips on quadrature error
        rc, out, _ = run_cli(capsys, "sweep", "--dim", "4", "--p", "3",
                             "--b", "0.019", "--c", "18,20,22",
                             "--grid-size", "2500", "--restarts", "2",
                             "--out", str(tmp_path))
        assert rc == 0
        assert "3 rows" in out
        rows = (tmp_path / "sweep.csv").read_text().splitlines()
        assert rows[0] == ",".join(PHASE_COLUMNS)
        recs = [dict(zip(PHASE_COLUMNS, r.split(","))) for r in rows[1:]]
        assert [r["predicted"] for r in recs] == [
            "zero_infimum_unattained", "zero_infimum_unattained",
            "ground_state"]
        assert float(recs[0]["infimum_estimate"]) >= -1e-6
        assert float(recs[2]["infimum_estimate"]) < 0
        assert recs[2]["agreement"] == "corroborated"

    def test_error_recorded_in_row_not_fatal(self, capsys, tmp_path):
        rc, _, _ = run_cli(capsys, "sweep", "--dim", "5", "--p", "2.5,5.0",
                           "--c", "1", *FAST, "--out", str(tmp_path))
        assert rc == 0
        rows = (tmp_path / "sweep.csv").read_text().splitlines()
        recs = [dict(zip(PHASE_COLUMNS, next(
            iter(__import__("csv").reader([r]))))) for r in rows[1:]]
        assert recs[0]["error"] == ""
        assert recs[1]["observed_status"] == "error"
        assert recs[1]["error"] != ""

    def test_byte_identical_across_jobs(self, capsys, tmp_path):
        base = ("sweep", "--dim", "5", "--p", "2.5,2.8", "--c", "1,2",
                *FAST)
        rc1, _, _ = run_cli(capsys, *base, "--out", str(tmp_path / "one"))
        rc2, _, _ = run_cli(capsys, *base, "--jobs", "2",
                            "--out", str(tmp_path / "two"))
        assert rc1 == rc2 == 0
        assert (tmp_path / "one" / "sweep.csv").read_bytes() == \
            (tmp_path / "two" / "sweep.csv").read_bytes()

    def test_json_round_trip(self, capsys, tmp_path):
        rc, _, _ = run_cli(capsys, "sweep", "--dim", "5", "--p", "2.5",
                           "--c", "1,2", *FAST, "--format", "json",
                           "--out", str(tmp_path))
        assert rc == 0
        table = json.loads((tmp_path / "sweep.json").read_text())
        assert table["columns"] == list(PHASE_COLUMNS)
        assert len(table["records"]) == 2
        again = render_report(table["records"], "json")
        assert json.loads(again) == table

    def test_gnuplot_block_per_group(self, capsys, tmp_path):
        rc, _, _ = run_cli(capsys, "sweep", "--dim", "5", "--p", "2.5,2.8",
                           "--c", "1,2", *FAST, "--format", "gnuplot",
                           "--out", str(tmp_path))
        assert rc == 0
        text = (tmp_path / "sweep.dat").read_text()
        headers = [l for l in text.splitlines() if l.startswith("# N=")]
        assert len(headers) == 2
        blocks = [b for b in text.split("\n\n\n") if b.strip()]
        assert len(blocks) == 2
        for block in blocks:
            data = [l for l in block.splitlines() if not l.startswith("#")]
            assert len(data) == 2


class TestConfigAndExits:
    def test_config_supplies_defaults_flags_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"out": str(tmp_path / "from_cfg")}))
        rc, _, _ = run_cli(capsys, "thresholds", "--dim", "4", "--p", "3",
                           "--config", str(cfg))
        assert rc == 0
        assert (tmp_path / "from_cfg" / "thresholds.json").exists()
        rc, _, _ = run_cli(capsys, "thresholds", "--dim", "4", "--p", "3",
                           "--config", str(cfg),
                           "--out", str(tmp_path / "flag_wins"))
        assert rc == 0
        assert (tmp_path / "flag_wins" / "thresholds.json").exists()

    def test_unknown_config_key_is_spec_error(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gridsize": 100}))
        rc, _, err = run_cli(capsys, "thresholds", "--dim", "4", "--p", "3",
                             "--config", str(cfg))
        assert rc == 2
        assert "unknown keys" in err

    def test_bad_p_is_spec_error(self, capsys):
        rc, _, err = run_cli(capsys, "thresholds", "--dim", "5", "--p", "9")
        assert rc == 2
        assert err.startswith("error:")

    def test_empty_axis_is_spec_error(self, capsys):
        rc, _, err = run_cli(capsys, "sweep", "--dim", "5", "--p", "2.5",
                             "--c", ",")
        assert rc == 2

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--dim", "4"])
        assert exc.value.code == 2

    def test_unwritable_out_is_io_error(self, capsys, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        rc, _, err = run_cli(capsys, "thresholds", "--dim", "4", "--p", "3",
                             "--out", str(blocker))
        assert rc == 3
        assert "i/o error" in err

    def test_spec_invariants(self):
        with pytest.raises(SpecError):
            SweepSpec(4, (3.0,), (1.0,), (1.0,), ())
        with pytest.raises(SpecError):
            SweepSpec(4, (3.0,), (1.0,), (1.0,), (-1.0,))
        with pytest.raises(SpecError):
            render_report([], "csv")

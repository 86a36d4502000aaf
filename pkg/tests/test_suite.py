import json

import numpy as np
import pytest

from jensengap import (FuzzReport, InvalidValueError, SuiteConfig,
                       build_discrete, fuzz, parse_generator, random_instance,
                       run_suite, run_suite_on_instance, sweep)
from jensengap.suite import (CSV_HEADER, fuzz_report_to_csv,
                             fuzz_report_to_json, parse_phi_family,
                             report_to_json, rows_to_csv, shrink)


class TestSuiteConfig:
    def test_defaults(self):
        config = SuiteConfig()
        assert config.enabled("main")
        assert config.enabled("power-mean[1,2]:normalized")
        assert not config.enabled("power-mean[1,2]:paper-literal")

    def test_explicit_selection(self):
        config = SuiteConfig(checks=("entropy",))
        assert config.enabled("entropy")
        assert not config.enabled("main")

    def test_literal_opt_in(self):
        config = SuiteConfig(checks=("all", "geometric-mean:paper-literal"))
        assert config.enabled("geometric-mean:paper-literal")
        assert not config.enabled("power-mean:paper-literal")

    def test_bad_tols(self):
        with pytest.raises(InvalidValueError):
            SuiteConfig(tol=0.0)


class TestRunSuite:
    def test_d1_full(self, d1):
        report = run_suite_on_instance(d1, SuiteConfig(trials=50))
        names = [r.check_name for r in report.rows]
        # main, stability, variational, erasure for each of id and log
        assert names.count("main") == 2
        assert names.count("stability") == 2
        assert names.count("variational") == 2
        assert names.count("erasure") == 2
        assert "entropy" in names
        assert "geometric-mean" in names
        assert any(n.startswith("power-mean[") for n in names)
        assert any(n.startswith("marginal-power-mean[") for n in names)
        assert report.ok
        assert not any(r.informational for r in report.rows)

    def test_concave_phi_routes_to_reversal(self, d1):
        config = SuiteConfig(checks=("main", "concave-reversal"),
                             phi_list=("pow:-0.5",))
        report = run_suite_on_instance(d1, config)
        assert [r.check_name for r in report.rows] == ["concave-reversal"]
        assert report.ok

    def test_log_skipped_on_negative_degrees(self):
        inst = build_discrete((1, 1), (1, 1), [[3, -2], [-2, 3]], (1, 2))
        report = run_suite_on_instance(inst, SuiteConfig(phi_list=("log",)))
        assert not report.rows
        assert any("hypotheses failed" in s["reason"] for s in report.skipped)

    def test_single_edge_skips_erasure(self, phi_id):
        inst = random_instance(3, 1, 2.0, seed=0)
        report = run_suite_on_instance(inst, SuiteConfig(phi_list=("id",),
                                                         trials=10))
        assert any(s["check"] == "erasure" for s in report.skipped)

    def test_multiple_instances(self, d1, t1):
        report = run_suite([d1, t1], SuiteConfig(checks=("main",),
                                                 phi_list=("id",)))
        assert [r.instance_id for r in report.rows] == ["D1", "T1"]


class TestParseGenerator:
    def test_matrix(self):
        inst = parse_generator("matrix:p=4,q=3,c=2.5", seed=9)
        assert inst.p == 4 and inst.q == 3
        cols = inst.v_space.masses @ inst.kernel
        assert np.max(np.abs(cols - 2.5)) < 1e-12

    def test_hypergraph(self):
        inst = parse_generator("hypergraph:p=5,q=6,k=2", seed=1)
        assert inst.meta["kind"] == "hypergraph"
        cols = inst.v_space.masses @ inst.kernel
        assert np.all(cols == 2.0)

    def test_hypergraph_regular(self):
        inst = parse_generator("hypergraph:p=4,q=6,k=2,regular=1", seed=1)
        degrees = inst.kernel.sum(axis=1)
        assert np.all(degrees == degrees[0])

    def test_sequence(self):
        inst = parse_generator("sequence:n=5", seed=2)
        assert inst.p == 5 and inst.q == 5

    def test_interval(self):
        inst = parse_generator("interval:nodes=16,rule=midpoint", seed=0)
        assert inst.p == 16
        assert inst.meta["id"] == "interval-midpoint-n16"

    def test_unknown_kind(self):
        with pytest.raises(InvalidValueError):
            parse_generator("tree:n=3", seed=0)

    def test_bad_parameter(self):
        with pytest.raises(InvalidValueError):
            parse_generator("matrix:p", seed=0)


class TestFuzz:
    def test_clean_run(self):
        report = fuzz(SuiteConfig(seed=7), 200)
        assert report.ok
        assert report.instances_tried == 200

    def test_deterministic(self):
        a = fuzz(SuiteConfig(seed=3), 60)
        b = fuzz(SuiteConfig(seed=3), 60)
        assert fuzz_report_to_json(a) == fuzz_report_to_json(b)

    def test_literal_power_mean_finds_violations(self):
        report = fuzz(SuiteConfig(seed=0), 40, literal_power_mean=True)
        assert not report.ok
        literal = [v for v in report.violations
                   if v.check.endswith(":paper-literal")]
        assert literal
        # shrinking drives the witnesses down to very few atoms
        for v in literal:
            assert len(v.instance["v_masses"]) <= 5
        assert any(len(v.instance["v_masses"]) == 1 for v in literal)

    def test_bad_count(self):
        with pytest.raises(InvalidValueError):
            fuzz(SuiteConfig(), 0)


class TestShrink:
    def test_shrinks_to_minimal_witness(self):
        inst = random_instance(8, 6, 2.0, seed=5)

        def always(candidate):
            return True

        small = shrink(inst, always)
        assert small.p == 1 and small.q == 1

    def test_preserves_column_constant(self):
        inst = random_instance(6, 4, 3.0, seed=2)

        def probe(candidate):
            cols = candidate.v_space.masses @ candidate.kernel
            return bool(np.max(np.abs(cols - 3.0)) < 1e-6)

        small = shrink(inst, probe)
        assert small.p < inst.p
        cols = small.v_space.masses @ small.kernel
        assert np.max(np.abs(cols - 3.0)) < 1e-6

    def test_keeps_original_when_nothing_shrinks(self, d1):
        def never(candidate):
            return False

        assert shrink(d1, never).p == d1.p


class TestSweep:
    def test_power_family(self, d1):
        report = sweep(d1, "pow:0.25..4:0.25", SuiteConfig())
        assert len(report.rows) + len(report.skipped) == 16
        assert report.ok
        names = {r.check_name for r in report.rows}
        assert names <= {"main", "concave-reversal"}

    def test_family_includes_concave_members(self, d1):
        report = sweep(d1, "pow:-0.75..-0.25:0.25", SuiteConfig())
        assert {r.check_name for r in report.rows} == {"concave-reversal"}
        assert report.ok

    def test_single_phi(self, d1):
        report = sweep(d1, "log", SuiteConfig())
        assert len(report.rows) == 1
        assert report.rows[0].phi == "log"

    def test_bad_family(self):
        with pytest.raises(InvalidValueError):
            parse_phi_family("pow:1..2:0")
        with pytest.raises(InvalidValueError):
            parse_phi_family("pow:2..1:0.5")

    def test_family_parse_count(self):
        family = parse_phi_family("pow:0.5..2:0.5")
        assert [phi.exponent for phi in family] == [0.5, 1.0, 1.5, 2.0]


class TestSerialization:
    def test_csv_shape(self, d1):
        report = run_suite_on_instance(d1, SuiteConfig(checks=("main",),
                                                       phi_list=("id",)))
        text = rows_to_csv(report.rows)
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert fields[0] == "D1" and fields[1] == "main"
        # floats carry full precision
        assert fields[3] == "24.666666666666668"

    def test_json_roundtrips(self, d1):
        report = run_suite_on_instance(d1, SuiteConfig(checks=("main",)))
        payload = json.loads(report_to_json(report))
        assert payload["violations"] == 0
        assert {row["check_name"] for row in payload["rows"]} == {"main"}

    def test_fuzz_csv_header(self):
        report = FuzzReport(instances_tried=0, seed=0)
        assert fuzz_report_to_csv(report).startswith(
            "index,check_name,phi,gap,instance_json\n")

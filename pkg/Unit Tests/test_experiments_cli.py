"""
Unit tests for configuration, reports and the command-line entry point.

Tests cover:
- Configuration validation, YAML round trips and the environment seed
- Report verdicts, discrepancy records and the JSON schema
- Small runs of every verification suite and the limit-law ladder over several seeds
- main() exit codes and output files for sample, overlap-hist and verify
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import time
import unittest
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent.resolve()))

from overlap_lab.errors import ConfigError, ParameterError
from overlap_lab.experiments.experiment_config import (
    DEFAULT_ENSEMBLE,
    SEED_ENV_VAR,
    ExperimentConfig,
    load_config,
    save_config,
    validate_config,
)
from overlap_lab.experiments.experiment_types import Command, Experiment
from overlap_lab.experiments.reporting import ExperimentReport, TestRecord, to_jsonable
from overlap_lab.analysis import ks_noise_scale
from overlap_lab.experiments.suites import SUITES, run_experiment
from overlap_lab.main import build_parser, main

# Wall-clock ceiling for the small invariance run; the full suite targets three minutes
INVARIANCE_SMOKE_BUDGET_S = 60.0


class TestExperimentTypes(unittest.TestCase):
    """Test cases for command and experiment enums."""

    def test_from_string(self):
        self.assertEqual(Command.from_string('overlap_hist'), Command.OVERLAP_HIST)
        self.assertEqual(Experiment.from_string('quenched_ov11'), Experiment.QUENCHED_OV11)
        self.assertTrue(Experiment.KOSTLAN.is_matrix_level)
        self.assertFalse(Experiment.LIMIT_LAW.is_matrix_level)
        with self.assertRaises(ValueError):
            Experiment.from_string('spectral-gap')


class TestConfig(unittest.TestCase):
    """Test cases for ExperimentConfig."""

    def test_validate_valid(self):
        self.assertEqual(validate_config({'ensemble': 'tue', 'n': 4, 'm': 8, 'alpha': 0.01}), [])

    def test_validate_errors(self):
        errors = validate_config({'n': 0, 'alpha': 2.0, 'format': 'xml', 'colour': 'red',
                                  'ensemble': 'goe', 'seed': 'abc'})
        self.assertEqual(len(errors), 6)
        self.assertTrue(any("Unknown key" in e for e in errors))
        self.assertEqual(validate_config({'n': 5, 'm': 3}), ["'m' must be >= 'n' (got n=5, m=3)"])
        self.assertEqual(len(validate_config([1, 2])), 1)

    def test_invalid_config_raises(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig({'threads': -1})

    def test_yaml_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'config.yaml')
            save_config({'ensemble': 'cge', 'n': 12, 'replicas': 40}, path)
            loaded = load_config(path)
            self.assertEqual(loaded, {'ensemble': 'cge', 'n': 12, 'replicas': 40})
            empty = os.path.join(tmp, 'empty.yaml')
            Path(empty).write_text('')
            self.assertEqual(load_config(empty), {})

    def test_scenario_files_are_valid(self):
        scenarios = Path(__file__).parent.parent / 'scenarios'
        files = sorted(scenarios.rglob('*.yaml'))
        self.assertGreater(len(files), 0)
        for path in files:
            self.assertEqual(validate_config(load_config(str(path))), [], str(path))

    def test_layering(self):
        config = ExperimentConfig.from_sources({'n': 8, 'seed': 3, 'ensemble': 'tue'}, {'n': 10, 'm': None})
        self.assertEqual(config.n, 10)
        self.assertEqual(config.seed, 3)
        self.assertEqual(config.ensemble, 'tue')
        self.assertEqual(config.alpha, 0.001)
        self.assertEqual(config.command, Command.VERIFY)
        self.assertIsNone(config.experiment_type)

    def test_seed_from_env_file(self):
        with tempfile.TemporaryDirectory() as tmp, mock.patch.dict(os.environ, {}):
            os.environ.pop(SEED_ENV_VAR, None)
            env_file = os.path.join(tmp, '.env')
            Path(env_file).write_text(f"{SEED_ENV_VAR}=123\n")
            config = ExperimentConfig.from_sources({}, {}, env_file=env_file)
            self.assertEqual(config.seed, 123)
            explicit = ExperimentConfig.from_sources({}, {'seed': 4}, env_file=env_file)
            self.assertEqual(explicit.seed, 4)

    def test_seed_default_and_bad_env(self):
        with tempfile.TemporaryDirectory() as tmp, mock.patch.dict(os.environ, {}):
            os.environ.pop(SEED_ENV_VAR, None)
            missing = os.path.join(tmp, 'missing.env')
            self.assertEqual(ExperimentConfig.from_sources({}, {}, env_file=missing).seed, 0)
            os.environ[SEED_ENV_VAR] = 'twelve'
            with self.assertRaises(ConfigError):
                ExperimentConfig.from_sources({}, {}, env_file=missing)


class TestReports(unittest.TestCase):
    """Test cases for TestRecord and ExperimentReport."""

    def test_discrepancy_does_not_fail_run(self):
        report = ExperimentReport('quenched-ov12', {'seed': 0})
        report.add(TestRecord('corrected', 'mean', estimate=1.0, reference=1.0, passed=True))
        report.add(TestRecord('printed', 'discrepancy', estimate=1.0, reference=0.5, passed=False, flagged=True))
        self.assertTrue(report.passed)
        self.assertEqual(report.exit_code(), 0)
        self.assertEqual([t.name for t in report.flagged()], ['printed'])
        report.add(TestRecord('broken', 'ks', passed=False))
        self.assertFalse(report.passed)
        self.assertEqual(report.exit_code(), 1)
        self.assertEqual(len(report.failures()), 1)

    def test_unknown_kind(self):
        with self.assertRaises(ParameterError):
            TestRecord('x', 'median')

    def test_json_schema(self):
        report = ExperimentReport('schur', {'n': 4})
        report.add(TestRecord('r', 'residual', estimate=1 + 2j, statistic=float('nan')))
        data = json.loads(report.to_json())
        self.assertEqual(data['schema'], 1)
        self.assertEqual(data['experiment'], 'schur')
        self.assertEqual(data['tests'][0]['estimate'], {'re': 1.0, 'im': 2.0})
        self.assertIsNone(data['tests'][0]['statistic'])
        self.assertTrue(data['passed'])

    def test_frame_columns(self):
        report = ExperimentReport('schur', {})
        report.add(TestRecord('a', 'mean', estimate=0.5 - 0.25j, standard_error=0.1 + 0.1j, reference=0.5))
        frame = report.to_frame()
        self.assertEqual(frame.loc[0, 'estimate_im'], -0.25)
        self.assertEqual(frame.loc[0, 'reference_re'], 0.5)

    def test_to_jsonable(self):
        self.assertEqual(to_jsonable({'a': np.int64(3), 'b': np.array([1.5, np.inf])}),
                         {'a': 3, 'b': [1.5, None]})


class TestRunExperiment(unittest.TestCase):
    """Test cases for run_experiment."""

    def test_requires_experiment(self):
        with self.assertRaises(ParameterError):
            run_experiment(ExperimentConfig({'seed': 1}))

    def test_deterministic_across_threads(self):
        base = {'experiment': 'schur', 'ensemble': 'cge', 'n': 4, 'replicas': 6, 'seed': 2}
        one = run_experiment(ExperimentConfig(dict(base, threads=1))).to_dict()['tests']
        many = run_experiment(ExperimentConfig(dict(base, threads=3))).to_dict()['tests']
        self.assertEqual(json.dumps(to_jsonable(one), sort_keys=True),
                         json.dumps(to_jsonable(many), sort_keys=True))

    def test_unsupported_ensemble(self):
        with self.assertRaises(ParameterError):
            run_experiment(ExperimentConfig({'experiment': 'quenched-ov11', 'ensemble': 'cge', 'seed': 0}))


class TestSuites(unittest.TestCase):
    """Small-size runs of every verification suite."""

    KINDS = ('cge', 'sph', 'tue')

    def run_suite(self, experiment, **values):
        config = ExperimentConfig(dict({'experiment': experiment, 'seed': 3}, **values))
        return {record.name: record for record in run_experiment(config).tests}

    def assert_enforced(self, record, kind):
        self.assertEqual(record.kind, kind, record.name)
        self.assertIsNotNone(record.threshold, record.name)

    def test_every_experiment_has_a_suite(self):
        self.assertEqual(set(SUITES), set(Experiment))

    def test_schur_runs_every_ensemble_by_default(self):
        records = self.run_suite('schur', n=4, replicas=3)
        expected = {f"{check}_{kind}_n4" for kind in self.KINDS
                    for check in ('reconstruction', 'unitarity', 'characteristic_polynomial')}
        self.assertEqual(set(records), expected)
        for kind in self.KINDS:
            record = records[f"reconstruction_{kind}_n4"]
            self.assertEqual(record.details['ensemble']['ensemble'], kind)
        for record in records.values():
            self.assert_enforced(record, 'residual')
            self.assertTrue(record.passed, record.name)

    def test_schur_single_ensemble(self):
        records = self.run_suite('schur', ensemble='tue', n=8, m=10, replicas=2)
        self.assertEqual(set(records), {'reconstruction_tue_n8', 'unitarity_tue_n8'})
        self.assertEqual(records['unitarity_tue_n8'].details['ensemble'], {'ensemble': 'tue', 'n': 8, 'm': 10})

    def test_identities_runs_every_ensemble_by_default(self):
        records = self.run_suite('identities', n=4, replicas=9)
        checks = ('row_sums', 'diagonal_at_least_one', 'hermitian_pairing', 'mixed_trace',
                  'mixed_trace_imaginary', 'recurrence_matches_full_matrix', 'unitary_invariance')
        self.assertEqual(set(records), {f"{check}_{kind}" for kind in self.KINDS for check in checks})
        self.assertEqual(records['row_sums_sph'].details['ensemble'], 'sph')
        self.assertEqual(records['row_sums_sph'].details['draws'] + records['row_sums_sph'].details['skipped'], 3)
        for record in records.values():
            self.assert_enforced(record, 'residual')
            self.assertTrue(record.passed, record.name)

    def test_quenched_ov11(self):
        records = self.run_suite('quenched-ov11', ensemble='sph', n=4, replicas=2000)
        self.assertEqual(set(records), {'ov11_conditional_mean', 'ov11_decomposition_mean'})
        for record in records.values():
            self.assert_enforced(record, 'mean')
            self.assertTrue(record.passed, record.name)

    def test_quenched_ov12(self):
        records = self.run_suite('quenched-ov12', ensemble='sph', n=3, replicas=500)
        self.assertEqual(set(records), {'ov12_mean', 'ov12_printed_leading_factor'})
        self.assert_enforced(records['ov12_mean'], 'mean')
        printed = records['ov12_printed_leading_factor']
        self.assertEqual(printed.kind, 'discrepancy')
        self.assertFalse(printed.counts_toward_verdict)
        self.assertEqual(printed.passed, not printed.flagged)

    def test_quenched_trace(self):
        tue = self.run_suite('quenched-trace', ensemble='tue', n=4, m=8, replicas=500)
        self.assertEqual(set(tue), {'trace_mean', 'trace_printed_formula'})
        self.assert_enforced(tue['trace_mean'], 'mean')
        self.assertEqual(tue['trace_printed_formula'].kind, 'discrepancy')
        sph = self.run_suite('quenched-trace', ensemble='sph', n=4, replicas=200)
        self.assertEqual(set(sph), {'trace_mean'})

    def test_decomposition_ks(self):
        records = self.run_suite('decomposition-ks', ensemble='tue', n=4, m=8, replicas=300)
        self.assertEqual(set(records), {'ov11_recurrence_vs_product', 'diagonal_is_prescribed',
                                        'first_column_law', 'contraction'})
        self.assert_enforced(records['ov11_recurrence_vs_product'], 'ks')
        self.assert_enforced(records['first_column_law'], 'ks')
        self.assertTrue(records['diagonal_is_prescribed'].passed)
        self.assertTrue(records['contraction'].passed)

    def test_kostlan(self):
        sph = self.run_suite('kostlan', ensemble='sph', n=4, replicas=200)
        self.assertEqual(set(sph), {'kostlan_sum', 'kostlan_max', 'sphere_height_uniform'})
        for record in sph.values():
            self.assert_enforced(record, 'ks')
            self.assertAlmostEqual(record.threshold, record.details['critical'])
        cge = self.run_suite('kostlan', ensemble='cge', n=4, replicas=200)
        self.assertEqual(set(cge), {'kostlan_sum', 'kostlan_max'})

    def test_limit_law_records(self):
        records = self.run_suite('limit-law', ensemble='sph', n=40, replicas=1000)
        expected = {'inverse_gamma2_n10', 'inverse_gamma2_n20', 'inverse_gamma2_n40', 'ks_decreases_with_n',
                    'origin_expectation_equals_n', 'origin_factor_second_moments'}
        expected |= {f"origin_factor_mean_k{k}" for k in range(3, 11)}
        self.assertEqual(set(records), expected)
        # only the final rung is held to the absolute threshold
        for n in (10, 20):
            self.assertIsNone(records[f"inverse_gamma2_n{n}"].threshold)
            self.assertTrue(records[f"inverse_gamma2_n{n}"].passed)
        self.assertEqual(records['inverse_gamma2_n40'].threshold, 0.03)
        ladder = records['ks_decreases_with_n']
        self.assert_enforced(ladder, 'residual')
        self.assertAlmostEqual(ladder.threshold, 4.0 * np.sqrt(2.0) * ks_noise_scale(1000))
        self.assertEqual(ladder.details['sizes'], [10, 20, 40])
        self.assertEqual(len(ladder.details['statistics']), 3)
        self.assertTrue(records['origin_expectation_equals_n'].passed)
        self.assertTrue(records['origin_factor_second_moments'].passed)

    def test_limit_law_ladder_across_seeds(self):
        for ensemble, seeds in (('sph', range(5)), ('tue', range(3))):
            for seed in seeds:
                records = self.run_suite('limit-law', ensemble=ensemble, n=40, replicas=2000, seed=seed)
                ladder = records['ks_decreases_with_n']
                self.assertTrue(ladder.passed, f"{ensemble} seed {seed}: {ladder.details['statistics']}")

    def test_integrals(self):
        records = self.run_suite('integrals', replicas=20_000)
        self.assertEqual(set(records), {
            'constant_c_1_2', 'constant_c_2_4', 'constant_d_1_0', 'constant_d_2_1',
            'integral_c_1_2', 'integral_c_1_3', 'integral_d_2_1', 'vector_v_norm_mean', 'vector_w_norm_mean',
            'spherical_vector_identity', 'tue_vector_identity'})
        for name in ('constant_c_1_2', 'constant_c_2_4', 'constant_d_1_0', 'constant_d_2_1'):
            self.assertEqual(records[name].kind, 'exact')
            self.assertTrue(records[name].passed, name)
        self.assert_enforced(records['integral_c_1_2'], 'residual')

    def test_default_embedding_sizes(self):
        trace = self.run_suite('quenched-trace', ensemble='tue', n=4, replicas=50)
        self.assertEqual(trace['trace_mean'].details['ensemble'], {'ensemble': 'tue', 'n': 4, 'm': 8})
        limit = self.run_suite('limit-law', ensemble='tue', n=8, replicas=200)
        self.assertEqual(limit['inverse_gamma2_n8'].details['ensemble'], {'ensemble': 'tue', 'n': 8, 'm': 8})

    def test_invariance_within_budget(self):
        started = time.perf_counter()
        records = self.run_suite('invariance', n=40, replicas=100)
        elapsed = time.perf_counter() - started
        self.assertEqual(set(records), {'spherical_band_medians', 'ginibre_control_separation'})
        self.assertEqual(records['spherical_band_medians'].details['spectra'], 100)
        self.assert_enforced(records['spherical_band_medians'], 'residual')
        self.assert_enforced(records['ginibre_control_separation'], 'exact')
        self.assertLess(elapsed, INVARIANCE_SMOKE_BUDGET_S)


class TestMain(unittest.TestCase):
    """Test cases for the command-line entry point."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def test_help_text_matches_defaults(self):
        buffer = io.StringIO()
        with contextlib.redirect_stdout(buffer):
            self.assertEqual(main(['verify', '--help']), 0)
        text = ' '.join(buffer.getvalue().split())
        self.assertIn(f"default: {DEFAULT_ENSEMBLE}", text)
        self.assertIn('default: 2N', text)
        self.assertIn('M = N for limit', text)

    def test_parser_defaults(self):
        args = build_parser().parse_args(['verify', '--experiment', 'kostlan'])
        self.assertEqual(args.command, 'verify')
        self.assertIsNone(args.n)
        self.assertFalse(args.verbose)

    def test_sample(self):
        code = main(['sample', '--ensemble', 'sph', '--n', '6', '--replicas', '3', '--seed', '1',
                     '--out', self.out])
        self.assertEqual(code, 0)
        frame = pd.read_csv(os.path.join(self.out, 'samples.csv'))
        self.assertEqual(list(frame.columns), ['replica', 'index', 're', 'im'])
        self.assertEqual(len(frame), 18)

    def test_sample_sphere_columns(self):
        code = main(['sample', '--ensemble', 'tue', '--n', '4', '--m', '6', '--sphere', '--out', self.out])
        self.assertEqual(code, 0)
        frame = pd.read_csv(os.path.join(self.out, 'samples.csv'))
        self.assertEqual(list(frame.columns), ['replica', 'index', 're', 'im', 'sx', 'sy', 'sz'])
        radius = frame['sx'] ** 2 + frame['sy'] ** 2 + frame['sz'] ** 2
        self.assertTrue(((radius - 1.0).abs() < 1e-12).all())

    def test_sample_is_reproducible(self):
        first, second = os.path.join(self.out, 'a'), os.path.join(self.out, 'b')
        for out in (first, second):
            main(['sample', '--n', '5', '--replicas', '2', '--seed', '7', '--out', out])
        self.assertEqual(Path(first, 'samples.csv').read_text(), Path(second, 'samples.csv').read_text())

    def test_overlap_hist(self):
        code = main(['overlap-hist', '--ensemble', 'sph', '--n', '2', '--replicas', '50', '--window', '5',
                     '--out', self.out])
        self.assertEqual(code, 0)
        summary = json.loads(Path(self.out, 'overlaps_summary.json').read_text())
        self.assertEqual(summary['schema'], 1)
        self.assertGreater(summary['count'], 0)
        frame = pd.read_csv(os.path.join(self.out, 'overlaps.csv'))
        self.assertEqual(list(frame.columns), ['replica', 're', 'im', 'o_scaled'])
        self.assertTrue((frame['o_scaled'] >= 0.5 - 1e-12).all())

    def test_overlap_hist_empty_window(self):
        code = main(['overlap-hist', '--ensemble', 'tue', '--n', '3', '--replicas', '2', '--window', '1e-9',
                     '--out', self.out])
        self.assertEqual(code, 2)

    def test_overlap_hist_size_guard(self):
        code = main(['overlap-hist', '--n', '40', '--max-n', '20', '--replicas', '1', '--out', self.out])
        self.assertEqual(code, 2)

    def test_verify_passes_and_writes_report(self):
        code = main(['verify', '--experiment', 'schur', '--ensemble', 'cge', '--n', '4', '--replicas', '5',
                     '--format', 'csv', '--out', self.out])
        self.assertEqual(code, 0)
        data = json.loads(Path(self.out, 'report_schur.json').read_text())
        self.assertEqual(data['schema'], 1)
        self.assertTrue(data['passed'])
        self.assertTrue(Path(self.out, 'report_schur.csv').exists())

    def test_verify_needs_experiment(self):
        self.assertEqual(main(['verify', '--out', self.out]), 2)

    def test_usage_errors(self):
        self.assertEqual(main(['sample', '--bogus']), 2)
        self.assertEqual(main(['verify', '--experiment', 'nonsense']), 2)
        self.assertEqual(main([]), 2)
        self.assertEqual(main(['verify', '--experiment', 'quenched-ov11', '--ensemble', 'cge',
                               '--out', self.out]), 2)

    def test_help(self):
        self.assertEqual(main(['--help']), 0)

    def test_config_file(self):
        path = os.path.join(self.out, 'run.yaml')
        save_config({'command': 'sample', 'n': 3, 'replicas': 2, 'seed': 5}, path)
        self.assertEqual(main(['sample', '--config', path, '--out', self.out]), 0)
        self.assertEqual(len(pd.read_csv(os.path.join(self.out, 'samples.csv'))), 6)
        self.assertEqual(main(['sample', '--config', os.path.join(self.out, 'absent.yaml')]), 2)


if __name__ == '__main__':
    unittest.main()

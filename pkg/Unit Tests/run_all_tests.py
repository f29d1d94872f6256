"""
Test runner script for all unit tests.

Run all unit tests with:
    python "Unit Tests/run_all_tests.py"

Or run specific test modules:
    python "Unit Tests/run_all_tests.py" test_linalg
    python "Unit Tests/run_all_tests.py" test_formulas test_overlaps
"""

import sys
import unittest
from pathlib import Path

# Repository root holds the overlap_lab package
repo_dir = Path(__file__).parent.parent.resolve()
sys.path.insert(0, str(repo_dir))
test_dir = Path(__file__).parent.resolve()
sys.path.insert(0, str(test_dir))


def discover_and_run_tests(test_modules=None):
    """
    Discover and run unit tests.

    Args:
        test_modules: Optional list of specific test modules to run.
                     If None, runs all tests.
    """
    loader = unittest.TestLoader()

    if test_modules:
        suite = unittest.TestSuite()
        for module_name in test_modules:
            try:
                module = __import__(module_name)
                suite.addTests(loader.loadTestsFromModule(module))
                print(f"Loaded tests from {module_name}")
            except ImportError as e:
                print(f"Warning: Could not import {module_name}: {e}")
    else:
        suite = loader.discover(str(test_dir), pattern='test_*.py', top_level_dir=str(test_dir))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    # Return exit code based on test results
    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    if len(sys.argv) > 1:
        exit_code = discover_and_run_tests(sys.argv[1:])
    else:
        exit_code = discover_and_run_tests()

    sys.exit(exit_code)

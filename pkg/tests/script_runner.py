"""Run a test module's ``test_*`` functions as a plain script (no pytest runner).

Each test module's ``main()`` delegates here so that
``python tests/test_<area>.py`` prints the same [INFO]/[OK]/[FAIL] lines
the rest of the project's scripts print.

Exit codes:
  0 - every test passed
  3 - at least one assertion failed
  4 - unexpected exception
"""
from __future__ import annotations

import inspect
import time
import traceback
import warnings
from typing import Callable, Dict, List, Tuple

import pytest


def run_module_tests(namespace: Dict[str, object], title: str) -> int:
    warnings.filterwarnings("ignore")
    tests: List[Tuple[str, Callable[[], None]]] = [
        (name, fn) for name, fn in namespace.items() if name.startswith("test_") and callable(fn)
    ]
    print(f"[INFO] {title}: {len(tests)} test(s)")
    failed = 0
    skipped = 0
    t0 = time.perf_counter()
    for i, (name, fn) in enumerate(tests, start=1):
        params = list(inspect.signature(fn).parameters)
        if params:
            # fixture-driven tests only run under pytest
            skipped += 1
            print(f"[SKIP {i}/{len(tests)}] {name} (pytest fixtures: {', '.join(params)})")
            continue
        try:
            fn()
        except (AssertionError, pytest.fail.Exception) as exc:
            failed += 1
            print(f"[FAIL {i}/{len(tests)}] {name}: {exc}")
        except Exception as exc:
            print(f"[ERROR {i}/{len(tests)}] {name}: {exc!r}")
            traceback.print_exc()
            return 4
        else:
            print(f"[OK {i}/{len(tests)}] {name}")
    elapsed = time.perf_counter() - t0
    print("\n===== Test Results =====")
    print(f"Status  : {'FAILURE' if failed else 'SUCCESS'}")
    print(f"Passed  : {len(tests) - failed - skipped}/{len(tests)} (skipped {skipped})")
    print(f"Elapsed : {elapsed:.2f}s")
    print("========================\n")
    return 3 if failed else 0

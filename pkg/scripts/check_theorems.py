#!/usr/bin/env python
"""
Run the randomized acceptance suites at full trial counts.

Suites:
- staged evaluator vs. brute-force oracle, under both logics
- three-valued results vs. two-valued results of the translated query
- per-condition ttcond/ffcond lockstep in random contexts
- FROM-shuffle and unnesting rewrite instances
- two-valued and three-valued agreement on NULL-free databases

Prints progress per suite and writes a summary to tests/results/theorems.txt.
Exit code 0 when every suite passes, 3 otherwise.
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Tuple

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from config.settings import AppConfig
from harness.equivalence import (
    check_condition_translations,
    check_logic_agreement,
    check_oracle,
    check_rewrites,
    check_translation,
    shuffle_instance,
    unnest_instance,
)
from harness.generators import DEFAULT_SCHEMAS, GenConfig
from semantics.logic import THREE_VALUED, TWO_VALUED
from syntax.parser import render


def _null_free_agreement(cfg: GenConfig, trials: int) -> List:
    null_free = replace(cfg, value_domain=tuple(v for v in cfg.value_domain if v is not None) or (0, 1))
    return check_logic_agreement(null_free, DEFAULT_SCHEMAS, trials)


def build_suites(cfg: GenConfig, scale: float) -> List[Tuple[str, Callable[[], List]]]:
    def n(count: int) -> int:
        return max(1, int(count * scale))

    return [
        ("oracle (2vl)", lambda: check_oracle(cfg, DEFAULT_SCHEMAS, TWO_VALUED, n(500))),
        ("oracle (3vl)", lambda: check_oracle(cfg, DEFAULT_SCHEMAS, THREE_VALUED, n(500))),
        ("translation preserves results", lambda: check_translation(cfg, DEFAULT_SCHEMAS, n(500))),
        ("condition translation", lambda: check_condition_translations(cfg, DEFAULT_SCHEMAS, n(1000))),
        ("FROM shuffle", lambda: check_rewrites(cfg, DEFAULT_SCHEMAS, shuffle_instance, trials=n(200))),
        ("unnesting", lambda: check_rewrites(cfg, DEFAULT_SCHEMAS, unnest_instance, trials=n(200))),
        ("NULL-free agreement", lambda: _null_free_agreement(cfg, n(300))),
    ]


def _describe(failure: object) -> str:
    query = getattr(failure, "query", None)
    if query is not None:
        return f"trial={failure.trial} query={render(query)}"  # type: ignore[attr-defined]
    return repr(failure)


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the randomized acceptance suites")
    parser.add_argument("--seed", type=int, default=None, help="Generator seed (default: NULLSQL_SEED or 0)")
    parser.add_argument("--scale", type=float, default=1.0, help="Multiply every trial count by this factor")
    parser.add_argument(
        "--out", default=str(PROJECT_ROOT / "tests" / "results" / "theorems.txt"), help="Summary file"
    )
    args = parser.parse_args()

    cfg = AppConfig().gen_config(seed=args.seed)
    suites = build_suites(cfg, args.scale)
    print(f"[INFO] seed={cfg.seed} max_rows={cfg.max_rows} depth={cfg.max_query_depth}")

    lines = [f"seed: {cfg.seed}"]
    failed = 0
    for i, (name, run) in enumerate(suites, start=1):
        print(f"[STEP {i}/{len(suites)}] {name}...")
        t0 = time.perf_counter()
        failures = run()
        elapsed = time.perf_counter() - t0
        if failures:
            failed += 1
            print(f"[FAIL] {name}: {len(failures)} failing trial(s) in {elapsed:.1f}s")
            for f in failures[:3]:
                print(f"       {_describe(f)}")
        else:
            print(f"[OK] {name} in {elapsed:.1f}s")
        lines.append(f"{name}: {'FAIL' if failures else 'OK'} ({len(failures)} failures, {elapsed:.1f}s)")

    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"[OK] Summary written to: {out}")
    except Exception as exc:
        print(f"[WARN] Could not write summary: {exc}")

    print("\n===== Theorem Results =====")
    print(f"Status : {'FAILURE' if failed else 'SUCCESS'}")
    print(f"Suites : {len(suites) - failed}/{len(suites)} passed")
    print("===========================\n")
    return 3 if failed else 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        print("Unexpected error during theorem run:", repr(e))
        sys.exit(4)

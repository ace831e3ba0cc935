#!/usr/bin/env python3
"""Compare the compiled and plain-Python kernel paths.

Runs the assignment solver and the tree growers on fixed seeded inputs in
two subprocesses -- one normal, one with RUNPERF_DISABLE_JIT=1 -- then
checks the numeric outputs agree bit for bit and reports wall times.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

WORKER = """
import json, sys, time
import numpy as np

from runperf._accel import JIT_ENABLED
from runperf.learners import BoostedEnsembleParams, train_boosted, model_to_json
from runperf.tracker import solve

out = {"jit": JIT_ENABLED}
repeats = int(sys.argv[1])
scale = 1.0 if JIT_ENABLED else float(sys.argv[2])

# assignment: solve a batch of seeded cost matrices
rng = np.random.default_rng(0)
mats = [rng.random((m, n)) for m, n in [(5, 7), (7, 7), (30, 40), (60, 60)]]
solve(mats[0])  # compile before timing
assignments = []
start = time.perf_counter()
for _ in range(max(1, int(repeats * scale))):
    assignments = [solve(m).tolist() for m in mats]
out["assign_seconds"] = (time.perf_counter() - start) / max(1, int(repeats * scale))
out["assignments"] = assignments

# boosting: one fixed fit, serialized canonically
rng = np.random.default_rng(1)
X = rng.normal(size=(300, 40))
y = (np.argsort(np.argsort(X[:, 0] + 0.3 * X[:, 1])) * 2 // len(X)) + 1
params = BoostedEnsembleParams(n_rounds=20, max_depth=4, seed=3)
train_boosted((X[:50], y[:50]), BoostedEnsembleParams(n_rounds=1, max_depth=2))
start = time.perf_counter()
model = train_boosted((X, y), params)
out["boost_seconds"] = time.perf_counter() - start
out["model_json"] = model_to_json(model)

json.dump(out, sys.stdout)
"""


def run_leg(disable_jit: bool, repeats: int, fallback_scale: float) -> dict:
    env = dict(os.environ)
    env.pop("RUNPERF_DISABLE_JIT", None)
    if disable_jit:
        env["RUNPERF_DISABLE_JIT"] = "1"
    with tempfile.NamedTemporaryFile("w", suffix=".py", delete=False) as fh:
        fh.write(WORKER)
        script = fh.name
    try:
        proc = subprocess.run(
            [sys.executable, script, str(repeats), str(fallback_scale)],
            capture_output=True, text=True, env=env, check=True,
            cwd=Path(__file__).resolve().parent.parent,
        )
    finally:
        os.unlink(script)
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50,
                        help="assignment batch repeats on the compiled leg")
    parser.add_argument("--fallback-scale", type=float, default=0.05,
                        help="fraction of repeats for the interpreted leg")
    args = parser.parse_args()

    fast = run_leg(disable_jit=False, repeats=args.repeats,
                   fallback_scale=args.fallback_scale)
    slow = run_leg(disable_jit=True, repeats=args.repeats,
                   fallback_scale=args.fallback_scale)
    if not fast["jit"]:
        print("warning: numba unavailable, both legs interpreted", file=sys.stderr)

    same_assign = fast["assignments"] == slow["assignments"]
    same_model = fast["model_json"] == slow["model_json"]
    print(f"assignment outputs identical: {same_assign}")
    print(f"boosted model bit-identical:  {same_model}")
    print(f"assignment batch: jit {fast['assign_seconds']*1e3:8.3f} ms"
          f"   python {slow['assign_seconds']*1e3:8.3f} ms"
          f"   speedup {slow['assign_seconds']/fast['assign_seconds']:.1f}x")
    print(f"boosted fit:      jit {fast['boost_seconds']:8.3f} s "
          f"   python {slow['boost_seconds']:8.3f} s "
          f"   speedup {slow['boost_seconds']/fast['boost_seconds']:.1f}x")
    return 0 if (same_assign and same_model) else 1


if __name__ == "__main__":
    sys.exit(main())

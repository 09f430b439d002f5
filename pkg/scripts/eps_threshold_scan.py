"""Scan the relaxed marginal problem over eps for one marginal-eps / marginal problem file.

    python scripts/eps_threshold_scan.py problems/bell-bell-eps.json [steps]

Prints eps* from the direct SDP, eps* from bisection and a verdict per grid point.
"""
import pathlib
import sys

REPO_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

import numpy as np

from qsdp.cli import setup_logging
from qsdp.config import load_config, marginal_settings, solver_options
from qsdp.errors import QsdpError
from qsdp.marginal import DISTANCES, bisect_eps_threshold, eps_threshold, marginal_feasibility_eps
from qsdp.problem_file import load_problem


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    steps = int(sys.argv[2]) if len(sys.argv) > 2 else 8
    setup_logging("WARNING")
    cfg = load_config()
    opts, ms = solver_options(cfg, "marginal-eps"), marginal_settings(cfg, "marginal-eps")
    try:
        problem = load_problem(sys.argv[1])
        spec = problem.payload.to_spec()
    except QsdpError as exc:
        print(f"ERROR: {exc}")
        return 1
    distances = [problem.payload.distance] if problem.task == "marginal-eps" else list(DISTANCES)

    for distance in distances:
        try:
            direct, _ = eps_threshold(spec, distance, opts, ms)
            bisected = bisect_eps_threshold(spec, distance=distance, opts=opts, settings=ms)
        except QsdpError as exc:
            print(f"[{distance}] ERROR: {exc}")
            continue
        print(f"[{distance}] eps* direct={direct:.6g}  bisection={bisected:.6g}")
        hi = max(2 * direct, 1e-3)
        header = f"{'eps':>10}  verdict"
        print(header)
        print("-" * len(header))
        for eps in np.linspace(0.0, hi, steps + 1):
            try:
                verdict = marginal_feasibility_eps(spec, float(eps), distance, opts, ms).verdict.value
            except QsdpError as exc:
                verdict = f"ERROR: {exc}"
            print(f"{eps:>10.4g}  {verdict}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

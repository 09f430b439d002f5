"""Write the SDP behind a problem file in SDPA sparse format.

    python scripts/export_sdpa.py problems/pauli-09-05.json [out.dat-s]
"""
import pathlib
import sys

REPO_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from qsdp.closeness import fidelity_problem, trace_distance_problem
from qsdp.errors import QsdpError
from qsdp.estimation import feasibility_problem, interval_problem, relaxation_problem
from qsdp.marginal import eps_problem, marginal_records
from qsdp.problem_file import Problem, load_problem
from qsdp.sdp import SdpProblem
from qsdp.sdpa import write_sdpa


def problem_sdp(problem: Problem) -> SdpProblem:
    pl = problem.payload
    task = problem.task
    if task in ("feasibility", "certificate", "verify-certificate"):
        return feasibility_problem(pl.to_records())
    if task == "intervals":
        return interval_problem(pl.to_records())
    if task in ("relax-linf", "relax-l1"):
        return relaxation_problem([r.exact() for r in pl.to_records()], task.split("-")[1])
    if task == "trace-distance":
        return trace_distance_problem(pl.to_records(), pl.target_state())
    if task == "fidelity-mixed":
        return fidelity_problem(pl.target_state().matrix, data=pl.to_records())
    if task == "marginal":
        spec = pl.to_spec()
        return feasibility_problem(marginal_records(spec), dim=spec.dim)
    if task == "marginal-eps":
        return eps_problem(pl.to_spec(), pl.eps, pl.distance)
    raise ValueError(f"task {task!r} has no single SDP to export")


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    src = pathlib.Path(sys.argv[1])
    out = pathlib.Path(sys.argv[2]) if len(sys.argv) > 2 else src.with_suffix(".dat-s")
    try:
        sdp = problem_sdp(load_problem(src))
    except (QsdpError, ValueError) as exc:
        print(f"ERROR: {exc}")
        return 1
    write_sdpa(sdp, out)
    print(f"{sdp.name}: {len(sdp.blocks)} blocks, {len(sdp.equalities)} equalities, {len(sdp.lmis)} LMIs -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Solve an LP-format MIP with HiGHS and write `name value` lines.

usage: highs_solve.py MODEL.lp SOLUTION.txt [time_limit_seconds]

Set NCS_MIP_CMD="python3 scripts/highs_solve.py {lp} {sol}" to use it.
"""
import sys

import highspy


def main() -> int:
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if len(sys.argv) > 3:
        h.setOptionValue("time_limit", float(sys.argv[3]))
    if h.readModel(lp_path) != highspy.HighsStatus.kOk:
        print(f"cannot read {lp_path}", file=sys.stderr)
        return 2
    h.run()
    status = h.getModelStatus()
    with open(sol_path, "w") as out:
        if status == highspy.HighsModelStatus.kInfeasible:
            out.write("# status: infeasible\n")
            return 0
        if status != highspy.HighsModelStatus.kOptimal:
            print(f"solver status {h.modelStatusToString(status)}", file=sys.stderr)
            return 1
        values = h.getSolution().col_value
        lp = h.getLp()
        out.write("# status: optimal\n")
        for name, v in zip(lp.col_names_, values):
            out.write(f"{name} {v!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

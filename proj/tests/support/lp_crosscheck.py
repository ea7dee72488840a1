"""Solve exported LP files with HiGHS and compare against the built-in solver."""

import pathlib
import subprocess
import sys

SKIP = 77


def main() -> int:
    lp_dump, out_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    try:
        import highspy
    except ImportError:
        print("highspy not importable; skipping")
        return SKIP

    subprocess.run([lp_dump, str(out_dir)], check=True)
    worst = 0.0
    rows = (out_dir / "objectives.tsv").read_text().splitlines()
    for row in rows:
        name, expected = row.split("\t")
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("mip_rel_gap", 0.0)
        h.setOptionValue("mip_abs_gap", 0.0)
        h.setOptionValue("mip_feasibility_tolerance", 1e-10)
        h.readModel(str(out_dir / name))
        h.run()
        got = h.getInfo().objective_function_value
        worst = max(worst, abs(got - float(expected)))
        print(f"{name}: highs {got:.12f} exact {float(expected):.12f}")
    print(f"max difference {worst:.3g} over {len(rows)} instances")
    return 0 if worst <= 1e-9 else 1


if __name__ == "__main__":
    sys.exit(main())

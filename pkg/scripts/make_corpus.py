"""Write the shipped scenario corpus and regenerate its expected reports.

    python3 scripts/make_corpus.py [--check]

With ``--check`` nothing is rewritten; the corpus is only run against the
existing expectations.
"""
import argparse
import sys
from pathlib import Path

from dercomp.cli import run_corpus

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

SCENARIOS = {
    "complete_z_p2": "command = complete\nring = Z\nideal = 2\nmodule = Z\nn_max = 3\nd_max = 2\n",
    "complete_z_p3_normalized": "command = complete\nring = Z\nideal = 3\nmodule = Z + Z/9\nn_max = 4\nd_max = 2\nmode = normalized\n",
    "complete_fp_fixed_point": "command = complete\nring = Z\nideal = 3\nmodule = Z/3\nn_max = 4\nd_max = 2\nmode = normalized\n",
    "gm_z_p2": "command = gm\nring = Z\nideal = 2\nmodule = Z\nk_max = 4\nd_max = 1\n",
    "gm_zero_ideal": "command = gm\nring = Z\nideal = 0\nmodule = Z\nk_max = 3\nd_max = 1\n",
    "compare_z4": "command = compare\nring = Z\nideal = 2\nmodule = Z/4\nn_max = 4\nk_max = 5\nd_max = 2\n",
    "compare_mixed_p3": "command = compare\nring = Z\nideal = 3\nmodule = Z + Z/9\nn_max = 4\nk_max = 5\nd_max = 2\n",
    "multitor_f2_cubed": "command = multitor\nring = Z\nmodules = Z/2,Z/2,Z/2\nd_max = 3\n",
    "multitor_group_ring": "command = multitor\nring = Z[t]/(t^2-1)\nmodules = Z,Z/2\nd_max = 4\n",
    "koszul_4_3": "command = koszul\nring = Z\nideal = 4,3\nk_max = 2\n",
    "fiber_check_z_p2": "command = fiber-check\nring = Z\nideal = 2\nmodule = Z + Z/4\nn_max = 3\nd_max = 3\nmode = normalized\n",
    "main_shadow_k22": "command = main-shadow\nring = Z\nalgebra = 2,2\ntarget = 2\nmodule = Z\nn_max = 4\nd_max = 1\n",
    "ss_shadow_z_z3": "command = ss-shadow\nring = Z\nideal = 3\nh0 = Z\nh1 = Z/3\nn_max = 4\nd_max = 2\n",
    "tower_adic": "command = tower\nring = Z\nstages = Z/3,Z/9,Z/27,Z/81\nmaps = 1,1,1\nmodule = Z\nideal = 3\n",
    "tower_pro_trivial": "command = tower\nring = Z\nstages = Z/2,Z/2,Z/2,Z/2\nmaps = 0,0,0\n",
    "cyclic_stage_2_4": "command = cyclic-stage\nq_src = 2\nq_tgt = 4\nprime = 2\nd_max = 6\n",
    "resolve_mixed": "command = resolve\nring = Z\nmodule = Z^2 + Z/4 + Z/6\n",
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="only run the corpus against its expectations")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    if not args.check:
        CORPUS.mkdir(exist_ok=True)
        for name, text in SCENARIOS.items():
            (CORPUS / f"{name}.scn").write_text(text, encoding="utf-8", newline="\n")
        run_corpus(CORPUS, jobs=args.jobs, update=True)
    return run_corpus(CORPUS, jobs=args.jobs)


if __name__ == "__main__":
    sys.exit(main())

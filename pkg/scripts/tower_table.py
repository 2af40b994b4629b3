"""Print the H_i towers of a derived completion as a table.

    python3 scripts/tower_table.py --ideal 2 --module "Z + Z/4" --n-max 4 --d-max 2
"""
import argparse

from dercomp.completion import CompletionProblem, derived_completion
from dercomp.modules import parse_module
from dercomp.resolutions import koszul_dga
from dercomp.rings import parse_ring
from dercomp.towers import lim_lim1, match_adic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ring", default="Z")
    ap.add_argument("--ideal", default="2", help="comma separated generators")
    ap.add_argument("--module", default="Z")
    ap.add_argument("--n-max", type=int, default=4)
    ap.add_argument("--d-max", type=int, default=2)
    ap.add_argument("--mode", default="normalized", choices=["normalized", "unnormalized"])
    args = ap.parse_args()
    R = parse_ring(args.ring)
    S = [R.parse_element(s) for s in args.ideal.split(",")]
    M = parse_module(args.module, R)
    r = derived_completion(CompletionProblem(koszul_dga(R, S), M, args.n_max, args.d_max, args.mode))
    width = max(len(f) for i in r.degrees for f in r.forms(i)) + 2
    print("    " + "".join(f"n={n}".ljust(width) for n in range(args.n_max + 1)) + "lim")
    for i in r.degrees:
        adic = match_adic(r.tower(i), r.module_homology[i].module, S, r.augmentations(i))
        lim, _ = lim_lim1(r.tower(i), adic)
        print(f"H{i}  " + "".join(f.ljust(width) for f in r.forms(i)) + str(lim.value if lim.value is not None else lim.kind))


if __name__ == "__main__":
    main()

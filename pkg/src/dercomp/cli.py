"""Command line front end: flat scenario files in, deterministic JSON reports out.

Exit codes: 0 computed or PASS, 2 verdict FAIL, 3 input error.
"""
from __future__ import annotations

import argparse
import difflib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .complexes import ChainComplex, homology_group
from .completion import (
    CompletionProblem,
    algebraic_to_geometric_shadow,
    compare_gm_cobar,
    cyclic_stage_comparison,
    derived_completion,
    fiber_tower_check,
    gm_completion,
    multitor,
    theorem_main_shadow,
    two_stage_complex,
)
from .matrix import Matrix
from .modules import CanonicalForm, ModuleMap, PresentedModule, parse_module
from .resolutions import (
    cyclic_group_resolution,
    koszul_algebra_map,
    koszul_dga,
    koszul_power,
    null_homotopy,
    resolve_pid,
    trivial_module_resolution,
)
from .rings import Integers, MonicQuotient, RingError, parse_ring
from .towers import ModuleTower, TowerVerdict, is_pro_trivial, lim_lim1, match_adic

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 2, 3

CONVENTIONS = {
    "grading": "homological; d lowers degree by 1",
    "tensor": "basis ordered by (left degree, left index, right index); d(x*y) = dx*y + (-1)^|x| x*dy",
    "hom": "Hom_n = prod_p Hom(C_p, D_(p+n)); df = d_D f - (-1)^n f d_C",
    "cone": "Cone_n = Y_n + X_(n-1); d(y, x) = (dy + fx, -dx)",
    "fiber": "Fib_n = X_n + Y_(n+1); d(x, y) = (dx, fx - dy)",
    "cobar": "level k = B^(k+1) (x) M, left-associated; coface s inserts the unit in slot s",
    "tot": "Tot^n_m = sum_(k<=n) X^k_(m+k) ordered by k; D = (-1)^k d + sum_i (-1)^i coface_i",
    "koszul": "exterior basis in colex order; d e_I = sum_j (-1)^j s_(i_j) e_(I - i_j)",
    "gm_grading": "Hom(Hom(K(S^k), A), M) with H_0 = M / S^k M; shift 0",
    "modules": "Z^r + Z/d1 + Z/d2 with d1 | d2, ascending",
    "integers": "decimal strings",
}

_COMMON = {"command", "ring", "mode"}
COMMANDS: dict[str, tuple[set, set]] = {
    "complete": ({"ideal", "module", "n_max", "d_max"}, {"ideal", "module"}),
    "gm": ({"ideal", "module", "k_max", "d_max"}, {"ideal", "module"}),
    "compare": ({"ideal", "module", "n_max", "k_max", "d_max"}, {"ideal", "module"}),
    "multitor": ({"modules", "d_max"}, {"modules"}),
    "koszul": ({"ideal", "k_max"}, {"ideal"}),
    "fiber-check": ({"ideal", "module", "n_max", "d_max"}, {"ideal", "module"}),
    "main-shadow": ({"algebra", "target", "module", "n_max", "d_max"}, {"algebra", "target"}),
    "ss-shadow": ({"ideal", "h0", "h1", "n_max", "d_max"}, {"ideal", "h0", "h1"}),
    "tower": ({"stages", "maps", "module", "ideal"}, {"stages", "maps"}),
    "cyclic-stage": ({"q_src", "q_tgt", "prime", "d_max"}, {"q_src", "q_tgt"}),
    "resolve": ({"module"}, {"module"}),
}


class ScenarioError(ValueError):
    def __init__(self, msg: str, source: str = "<args>", line: int | None = None, col: int | None = None):
        self.msg, self.source, self.line, self.col = msg, source, line, col
        super().__init__(str(self))

    def __str__(self):
        loc = self.source
        if self.line is not None:
            loc += f":{self.line}:{self.col or 1}"
        return f"{loc}: {self.msg}"


@dataclass
class Scenario:
    command: str
    values: dict = field(default_factory=dict)
    positions: dict = field(default_factory=dict)
    source: str = "<args>"

    def error(self, key: str, msg: str) -> ScenarioError:
        line, col = self.positions.get(key, (None, None))
        return ScenarioError(msg, self.source, line, col)

    def text(self, key: str, default: str | None = None) -> str | None:
        return self.values.get(key, default)

    def integer(self, key: str, default: int, lo: int = 0) -> int:
        raw = self.values.get(key)
        if raw is None:
            return default
        try:
            v = int(raw)
        except ValueError:
            raise self.error(key, f"{key} must be an integer, got {raw!r}") from None
        if v < lo:
            raise self.error(key, f"{key} must be >= {lo}")
        return v

    def items(self, key: str) -> list[str]:
        raw = self.values.get(key, "")
        parts = [p.strip() for p in raw.split(",")]
        if any(not p for p in parts):
            raise self.error(key, f"empty entry in {key}")
        return parts


_ALIASES = {"gens": "ideal"}


def parse_scenario(text: str, source: str = "<text>") -> Scenario:
    """``key = value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    values, positions = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", source, lineno, len(raw) - len(raw.lstrip()) + 1)
        key, _, val = line.partition("=")
        col = len(key) - len(key.lstrip()) + 1
        key = _ALIASES.get(key.strip(), key.strip())
        if key in values:
            raise ScenarioError(f"duplicate key {key!r}", source, lineno, col)
        values[key] = val.strip()
        positions[key] = (lineno, col)
    if "command" not in values:
        raise ScenarioError("missing key 'command'", source)
    sc = Scenario(values["command"], values, positions, source)
    validate(sc)
    return sc


def validate(sc: Scenario) -> None:
    if sc.command not in COMMANDS:
        raise sc.error("command", f"unknown command {sc.command!r}")
    allowed, required = COMMANDS[sc.command]
    for key in sc.values:
        if key not in allowed | _COMMON:
            raise sc.error(key, f"unknown key {key!r} for command {sc.command!r}")
    for key in sorted(required):
        if key not in sc.values:
            raise ScenarioError(f"missing key {key!r} for command {sc.command!r}", sc.source)
    mode = sc.values.get("mode", "unnormalized")
    if mode not in ("normalized", "unnormalized"):
        raise sc.error("mode", f"mode must be normalized or unnormalized, got {mode!r}")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _matrix_rows(M: Matrix) -> list:
    return [[M.ring.format(x) for x in row] for row in M.to_rows()]


def plain(x):
    """Convert engine values into JSON-ready data with integers as strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    if isinstance(x, TowerVerdict):
        return {"kind": x.kind, "value": None if x.value is None else str(x.value),
                "certificate": plain(x.certificate)}
    if isinstance(x, Matrix):
        return _matrix_rows(x)
    if isinstance(x, ModuleMap):
        return _matrix_rows(x.matrix)
    if isinstance(x, (CanonicalForm, PresentedModule)) or hasattr(x, "form"):
        return str(x)
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    return str(x)


def dump_report(report: dict) -> str:
    return json.dumps(plain(report), indent=2, ensure_ascii=False) + "\n"


def _tower_report(T: ModuleTower, adic: TowerVerdict | None = None) -> dict:
    lim, lim1 = lim_lim1(T, adic)
    out = {
        "stages": [str(f) for f in T.forms()],
        "maps": [f.matrix for f in T.maps],
        "lim": lim,
        "lim1": lim1,
        "pro_trivial": is_pro_trivial(T),
    }
    if adic is not None:
        out["adic"] = adic
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _ring(sc: Scenario):
    try:
        return parse_ring(sc.text("ring", "Z"))
    except RingError as e:
        raise sc.error("ring", str(e)) from None


def _ideal(sc: Scenario, ring, key: str = "ideal") -> list:
    try:
        return [ring.parse_element(s) for s in sc.items(key)]
    except ValueError as e:
        raise sc.error(key, f"bad ideal generator: {e}") from None


def _module(sc: Scenario, ring, key: str = "module") -> PresentedModule:
    try:
        return parse_module(sc.text(key), ring)
    except (ValueError, RingError) as e:
        raise sc.error(key, f"bad module literal: {e}") from None


def _adic(T, M, S, augs, ring):
    if not isinstance(ring, Integers):
        return None
    return match_adic(T, M, S, augs)


def cmd_complete(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    M = _module(sc, ring)
    P = CompletionProblem(koszul_dga(ring, S), M, sc.integer("n_max", 3), sc.integer("d_max", 3), mode)
    r = derived_completion(P)
    table, towers = {}, {}
    for i in r.degrees:
        table[f"H{i}"] = ",".join(r.forms(i))
        T = r.tower(i)
        towers[f"H{i}"] = _tower_report(T, _adic(T, r.module_homology[i].module, S, r.augmentations(i), ring))
    ok = r.check_triangles()
    return {"table": table, "towers": towers, "triangles_commute": ok}, ok, False


def cmd_gm(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    M = _module(sc, ring)
    g = gm_completion(ring, S, M, sc.integer("k_max", 4, 1), sc.integer("d_max", 2))
    table, towers = {}, {}
    for i in range(g.d_max + 1):
        table[f"H{i}"] = ",".join(g.forms(i))
        T = g.tower(i)
        adic = _adic(T, g.module_homology[i].module, S, g.augmentations(i), ring) if T.top >= 1 else None
        towers[f"H{i}"] = _tower_report(T, adic)
    return {"shift": 0, "table": table, "towers": towers}, True, False


def cmd_compare(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    M = _module(sc, ring)
    mode = sc.text("mode", "normalized") if mode is None else mode
    c = compare_gm_cobar(ring, S, M, sc.integer("n_max", 4), sc.integer("k_max", 4, 1),
                         sc.integer("d_max", 2), mode)
    cob, gm = c["cobar"], c["gm"]
    higher = {f"H{i}": {"cobar": v1, "gm": v2} for i, (v1, v2) in c["higher"].items()}
    res = {
        "verdict": c["verdict"],
        "cobar": {f"H{i}": ",".join(cob.forms(i)) for i in cob.degrees},
        "gm": {f"H{i}": ",".join(gm.forms(i)) for i in range(gm.d_max + 1)},
        "interleave": c["interleave"],
        "adic_cobar": c["adic_cobar"],
        "adic_gm": c["adic_gm"],
        "lim_gm": c["lim_gm"],
        "lim1_gm": c["lim1_gm"],
        "higher": higher,
    }
    return res, c["verdict"] == "PASS", True


def _group_ring_module(text: str, ring: MonicQuotient, length: int):
    q = ring.degree
    t = text.replace(" ", "")
    if t == "Z":
        return cyclic_group_resolution(q, length)
    if t.startswith("Z/") and t[2:].isdigit():
        return trivial_module_resolution(q, int(t[2:]), length)
    raise ValueError(f"over a group ring only trivial modules Z and Z/d are supported, got {text!r}")


def _elementary_ranks(forms: list[CanonicalForm]) -> str | None:
    primes = {d for f in forms for d in f.factors}
    if len(primes) != 1 or any(f.free_rank for f in forms):
        return None
    (p,) = primes
    if not isinstance(p, int):
        return None
    return ",".join(str(len(f.factors)) for f in forms)


def cmd_multitor(sc: Scenario, mode: str):
    ring = _ring(sc)
    d_max = sc.integer("d_max", 3)
    mods = []
    for lit in sc.items("modules"):
        try:
            if isinstance(ring, MonicQuotient):
                mods.append(_group_ring_module(lit, ring, d_max + 1))
            else:
                mods.append(parse_module(lit, ring))
        except (ValueError, RingError) as e:
            raise sc.error("modules", str(e)) from None
    r = multitor(ring, mods, d_max)
    forms = [r[i].form for i in range(d_max + 1)]
    res = {"degrees": {f"H{i}": str(r[i]) for i in range(d_max + 1)}}
    ranks = _elementary_ranks(forms)
    if ranks is not None:
        res["elementary_ranks"] = ranks
    return res, True, False


def cmd_koszul(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    out = {}
    ok = True
    for k in range(1, sc.integer("k_max", 4, 1) + 1):
        A = koszul_power(ring, S, k)
        K = A.underlying
        entry = {"homology": {f"H{i}": str(homology_group(K, i)) for i in K.degrees}, "homotopies": {}}
        for j in range(len(S)):
            h = null_homotopy(ring, S, k, j)
            good = True
            for n in range(len(S) + 1):
                lhs = K.d(n + 1) @ h[n]
                if n - 1 in h:
                    lhs = lhs + h[n - 1] @ K.d(n)
                good = good and lhs == Matrix.scalar(ring, K.rank(n), A.generators[j])
            ok = ok and good
            entry["homotopies"][f"e{j}"] = {"scalar": ring.format(A.generators[j]), "identity_holds": good,
                                           "h": {f"h{n}": h[n] for n in sorted(h)}}
        out[f"k{k}"] = entry
    return {"stages": out}, ok, True


def cmd_fiber_check(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    P = CompletionProblem(koszul_dga(ring, S), _module(sc, ring), sc.integer("n_max", 3),
                          sc.integer("d_max", 3), mode)
    rows = {}
    ok = True
    for n in range(P.n_max + 1):
        r = fiber_tower_check(P, n)
        rows[f"n{n}"] = r["rows"]
        ok = ok and r["ok"]
    return {"stages": rows}, ok, True


def _generator_map(B, C, ring, SB, SC):
    images = []
    for s in SB:
        hits = [j for j, c in enumerate(SC) if c == s]
        if not hits:
            raise ValueError(f"generator {ring.format(s)} has no matching generator in the target")
        images.append({C.koszul_basis[1].index((hits[0],)): ring.one()})
    return koszul_algebra_map(B, C, images)


def cmd_main_shadow(sc: Scenario, mode: str):
    ring = _ring(sc)
    SB, SC = _ideal(sc, ring, "algebra"), _ideal(sc, ring, "target")
    B, C = koszul_dga(ring, SB), koszul_dga(ring, SC)
    try:
        phi = _generator_map(B, C, ring, SB, SC)
    except ValueError as e:
        raise sc.error("algebra", str(e)) from None
    M = _module(sc, ring) if "module" in sc.values else parse_module("Z", ring)
    mode = sc.text("mode", "normalized") if mode is None else mode
    r = theorem_main_shadow(B, C, phi, M, sc.integer("n_max", 4), sc.integer("d_max", 2), mode)
    degrees = {}
    for i, e in r["degrees"].items():
        d = {"source": ",".join(e["B"]), "target": ",".join(e["C"]),
             "kernel": e["kernel"], "cokernel": e["cokernel"], "ok": e["ok"]}
        if "stagewise_iso" in e:
            d["stagewise_iso"] = e["stagewise_iso"]
        degrees[f"H{i}"] = d
    return {"label": r["label"], "degrees": degrees}, r["ok"], True


def cmd_ss_shadow(sc: Scenario, mode: str):
    ring = _ring(sc)
    S = _ideal(sc, ring)
    M = two_stage_complex(_module(sc, ring, "h0"), _module(sc, ring, "h1"))
    mode = sc.text("mode", "normalized") if mode is None else mode
    r = algebraic_to_geometric_shadow(M, koszul_dga(ring, S), S, sc.integer("n_max", 3),
                                      sc.integer("d_max", 2), mode)
    degrees = {f"H{i}": {"stages": ",".join(d["forms"]), "lim": d["lim"], "lim1": d["lim1"],
                         "predicted": d["predicted"], "match": d["match"]} for i, d in r["degrees"].items()}
    return {"homology": {f"H{i}": v for i, v in r["homology"].items()}, "exact": r["exact"],
            "degrees": degrees}, r["ok"], True


def cmd_tower(sc: Scenario, mode: str):
    ring = _ring(sc)
    stages = []
    for lit in sc.items("stages"):
        try:
            Mk = parse_module(lit, ring)
        except (ValueError, RingError) as e:
            raise sc.error("stages", str(e)) from None
        if Mk.ngens != 1:
            raise sc.error("stages", f"tower stages must be cyclic, got {lit!r}")
        stages.append(Mk)
    factors = sc.items("maps")
    if len(factors) != len(stages) - 1:
        raise sc.error("maps", "need one map per consecutive pair of stages")
    maps = []
    for k, f in enumerate(factors):
        try:
            a = ring.parse_element(f)
        except ValueError as e:
            raise sc.error("maps", str(e)) from None
        try:
            maps.append(ModuleMap(stages[k + 1], stages[k], Matrix.from_rows(ring, [[a]])))
        except ValueError as e:
            raise sc.error("maps", f"map {k} is not well defined: {e}") from None
    T = ModuleTower(stages, maps, "scenario")
    adic = None
    if "module" in sc.values and "ideal" in sc.values:
        M = _module(sc, ring)
        S = _ideal(sc, ring)
        augs = [ModuleMap(M, Mk, Matrix.from_rows(ring, [[ring.one()]] * Mk.ngens)) for Mk in stages]
        adic = _adic(T, M, S, augs, ring)
    return _tower_report(T, adic), True, False


def cmd_cyclic_stage(sc: Scenario, mode: str):
    r = cyclic_stage_comparison(sc.integer("q_src", 2, 2), sc.integer("q_tgt", 4, 2),
                                sc.integer("d_max", 6), sc.integer("prime", 2, 2))
    return {"rows": r["rows"]}, r["ok"], True


def cmd_resolve(sc: Scenario, mode: str):
    ring = _ring(sc)
    R = resolve_pid(_module(sc, ring))
    C: ChainComplex = R.complex
    return {"ranks": {f"C{n}": C.rank(n) for n in C.degrees},
            "differentials": {f"d{n}": C.d(n) for n in sorted(C.diffs)},
            "homology": {f"H{n}": str(homology_group(C, n)) for n in C.degrees}}, True, False


HANDLERS = {
    "complete": cmd_complete,
    "gm": cmd_gm,
    "compare": cmd_compare,
    "multitor": cmd_multitor,
    "koszul": cmd_koszul,
    "fiber-check": cmd_fiber_check,
    "main-shadow": cmd_main_shadow,
    "ss-shadow": cmd_ss_shadow,
    "tower": cmd_tower,
    "cyclic-stage": cmd_cyclic_stage,
    "resolve": cmd_resolve,
}


def run_scenario(sc: Scenario, mode: str | None = None) -> tuple[dict, int]:
    """Execute a validated scenario; returns the report and the exit code."""
    if mode is not None:
        sc.values["mode"] = mode
    start = time.perf_counter()
    default_mode = mode or sc.text("mode", "unnormalized")
    handler = HANDLERS[sc.command]
    if sc.command in ("compare", "main-shadow", "ss-shadow"):
        result, ok, judged = handler(sc, mode)
    else:
        result, ok, judged = handler(sc, default_mode)
    status = ("PASS" if ok else "FAIL") if judged else ("COMPUTED" if ok else "FAIL")
    report = {
        "engine": {"name": "dercomp", "version": __version__},
        "conventions": CONVENTIONS,
        "scenario": {k: sc.values[k] for k in sorted(sc.values)},
        "status": status,
        "result": result,
        "timing_seconds": f"{time.perf_counter() - start:.3f}",
    }
    return report, EXIT_OK if ok else EXIT_FAIL


def strip_timing(text: str) -> str:
    data = json.loads(text)
    data.pop("timing_seconds", None)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def _run_file(path: str) -> tuple[str, str | None, str | None]:
    try:
        sc = parse_scenario(Path(path).read_text(encoding="utf-8"), path)
        report, _ = run_scenario(sc)
        return path, dump_report(report), None
    except Exception as e:  # reported per scenario
        return path, None, f"{type(e).__name__}: {e}"


def run_corpus(directory: str | Path, jobs: int = 1, update: bool = False, out=None) -> int:
    """Run every ``*.scn`` file and byte-compare against ``*.expected.json`` (timing excluded)."""
    out = sys.stdout if out is None else out
    d = Path(directory)
    if not d.is_dir():
        print(f"error: {d} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    files = sorted(str(p) for p in d.glob("*.scn"))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_file, files))
    else:
        results = [_run_file(f) for f in files]
    failed = 0
    for path, text, err in sorted(results):
        name = Path(path).stem
        exp = Path(path).with_suffix(".expected.json")
        if err is not None:
            failed += 1
            print(f"ERROR {name}: {err}", file=out)
            continue
        if update:
            exp.write_text(text, encoding="utf-8", newline="\n")
            print(f"WROTE {name}", file=out)
            continue
        if not exp.exists():
            failed += 1
            print(f"MISSING {name}: no {exp.name}", file=out)
            continue
        try:
            want = strip_timing(exp.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            failed += 1
            print(f"FAIL {name}: expectation is not valid JSON ({e})", file=out)
            continue
        got = strip_timing(text)
        if got == want:
            print(f"PASS {name}", file=out)
        else:
            failed += 1
            print(f"FAIL {name}", file=out)
            diff = difflib.unified_diff(want.splitlines(), got.splitlines(), "expected", "actual", lineterm="")
            for line in list(diff)[:40]:
                print(f"    {line}", file=out)
    n = len(files)
    print(f"{n} scenario{'s' if n != 1 else ''}, {n - failed} passed, {failed} failed", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _assignments(items: list[str], command: str, base: Scenario | None) -> Scenario:
    values = dict(base.values) if base else {"command": command}
    positions = dict(base.positions) if base else {}
    values["command"] = command
    for n, item in enumerate(items, 1):
        if "=" not in item:
            raise ScenarioError(f"expected key=value, got {item!r}", "<args>", 1, n)
        k, _, v = item.partition("=")
        k = _ALIASES.get(k.strip(), k.strip())
        values[k] = v.strip()
        positions[k] = (1, n)
    sc = Scenario(command, values, positions, base.source if base else "<args>")
    validate(sc)
    return sc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dercomp", description="Exact derived completion towers and comparisons.")
    ap.add_argument("--version", action="version", version=f"dercomp {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario file (key = value lines)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--mode", choices=["normalized", "unnormalized"], help="override the Tot mode")

    p = sub.add_parser("run", help="run a scenario file")
    common(p)
    p = sub.add_parser("corpus", help="run a directory of scenarios against expected reports")
    p.add_argument("directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--update", action="store_true", help="rewrite the expected reports")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} computation")
        p.add_argument("assignments", nargs="*", metavar="key=value")
        common(p)
    return ap


_KNOWN_FLAGS = {"--scenario", "--out", "--mode", "--jobs", "--update", "--version", "--help", "-h"}


def _flag_assignments(argv: list[str]) -> list[str]:
    """Rewrite ``--key value`` / ``--key=value`` for scenario keys into ``key=value``.

    Known options are moved behind the positional tokens so that argparse
    sees every ``key=value`` pair in one run.
    """
    if not argv or argv[0].startswith("-"):
        return argv
    out, flags, i = [argv[0]], [], 1
    while i < len(argv):
        tok = argv[i]
        name = tok.partition("=")[0]
        if not tok.startswith("-") or name in _KNOWN_FLAGS:
            if not tok.startswith("-"):
                out.append(tok)
            else:
                flags.append(tok)
                if "=" not in tok and name not in ("--update", "--version", "--help", "-h") and i + 1 < len(argv):
                    flags.append(argv[i + 1])
                    i += 1
            i += 1
            continue
        key = tok[2:]
        if "=" in key:
            key, _, val = key.partition("=")
        elif i + 1 < len(argv):
            val = argv[i + 1]
            i += 1
        else:
            raise ScenarioError(f"flag {tok} needs a value")
        key = key.replace("-", "_")
        out.append(f"{_ALIASES.get(key, key)}={val}")
        i += 1
    return out + flags


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _flag_assignments(argv)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    args = build_parser().parse_args(argv)
    if args.cmd == "corpus":
        return run_corpus(args.directory, jobs=max(1, args.jobs), update=args.update)
    try:
        base = None
        if args.scenario:
            path = Path(args.scenario)
            if not path.exists():
                raise ScenarioError("no such scenario file", str(path))
            base = parse_scenario(path.read_text(encoding="utf-8"), str(path))
        if args.cmd == "run":
            if base is None:
                raise ScenarioError("run needs --scenario")
            sc = base
        else:
            if base is not None and base.command != args.cmd:
                raise ScenarioError(f"scenario is for {base.command!r}, not {args.cmd!r}", base.source)
            sc = _assignments(args.assignments, args.cmd, base)
        report, code = run_scenario(sc, args.mode)
    except (ScenarioError, RingError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = dump_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: every check as a subcommand with text or JSON output.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage
errors (bad flags, unreadable or malformed input files).
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from . import __version__
from .archain import (RingPreinj, build_preinj, build_preproj, canonical_sequence_check,
                      check_lemma_surj, default_length, gamma_check, purity_witnesses,
                      reflection_check, torsion_decompose, torsion_stabilize)
from .exactla import FieldSpec
from .freegraded import build_slices, check_lemma_exact_sequence, hilbert, recurrence_dims
from .kronrep import KronRep, euler_form, ext1_dim, hom_dim, random_rep
from .meshcat import compare_mesh_vs_modules
from .qgrside import default_hi, gamma_star_check, qgr_R_hom, tilting_check
from .report import Check, all_passed, check

SCHEMA = "kronrho/1"
HILBERT_CAP = {2: 12, 3: 8, 4: 6}
RATIONAL_LENGTH_CAP = 5
QGR_DEGREES = range(-1, 5)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    N: int = 2
    field: FieldSpec = FieldSpec.prime()
    cap_deg: Optional[int] = None
    cap_len: Optional[int] = None
    seed: int = 0
    output: str = "text"
    strictness: str = "dims"
    torsion_cap: int = 10
    random_count: int = 10
    module_file: Optional[str] = None

    def __post_init__(self):
        if self.N < 2:
            raise UsageError("N must be at least 2")
        for name in ("cap_deg", "cap_len"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name.replace('_', '-')} must be positive")
        if self.torsion_cap < 1 or self.random_count < 0:
            raise UsageError("torsion cap must be positive and the random count nonnegative")

    @property
    def length(self) -> int:
        if self.cap_len is not None:
            return self.cap_len
        L = default_length(self.N)
        return min(L, RATIONAL_LENGTH_CAP) if self.field.is_rational else L

    @property
    def full(self) -> bool:
        return self.strictness == "full"

    def echo(self) -> Dict:
        return {"n": self.N, "field": self.field.name, "cap_deg": self.cap_deg,
                "cap_len": self.length, "seed": self.seed, "strictness": self.strictness,
                "torsion_cap": self.torsion_cap, "random": self.random_count,
                "module_file": self.module_file}


@dataclass
class Report:
    command: str
    config: RunConfig
    checks: List[Check]
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all_passed(self.checks)

    def to_json(self) -> Dict:
        # wall time is left out so that equal inputs give equal bytes
        return {"schema": SCHEMA, "version": __version__, "command": self.command,
                "config": self.config.echo(), "passed": self.passed,
                "checks": [c.to_json() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def text(self) -> str:
        lines = [f"kronrho {self.command}  N={self.config.N}  field={self.config.field.name}"
                 f"  seed={self.config.seed}"]
        for c in self.checks:
            nums = ", ".join(f"{k}={v}" for k, v in c.to_json()["numbers"].items()
                             if not isinstance(v, (dict, list)) or len(str(v)) < 60)
            lines.append(f"  {c.status.upper():<5} {c.name}  [{c.anchor}]  {nums}")
        n_pass = sum(c.passed for c in self.checks)
        lines.append(f"{n_pass}/{len(self.checks)} checks passed in {self.wall_time:.2f} s")
        return "\n".join(lines)


# ----------------------------------------------------------------- commands

def cmd_hilbert(cfg: RunConfig) -> List[Check]:
    N, F = cfg.N, cfg.field
    n_max = cfg.cap_deg or HILBERT_CAP.get(N, 6)
    dims = hilbert(N, n_max, F)
    rec = recurrence_dims(N, n_max)
    out = [check(f"hilbert N={N} up to {n_max}", "hilbert-recurrence", dims == rec,
                 eliminated=dims, recurrence=rec)]
    slices = build_slices(N, n_max, F)
    out += [check_lemma_exact_sequence(N, n, slices) for n in range(1, n_max)]
    return out


def cmd_gamma(cfg: RunConfig) -> List[Check]:
    N, F, L = cfg.N, cfg.field, cfg.length
    chain = build_preproj(N, L, F)
    cap = min(cfg.cap_deg or 6, L)
    rec = recurrence_dims(N, L + 1)
    dims = [[r.d0, r.d1] for r in chain.reps]
    expected = [[rec[n - 1] if n else 0, rec[n]] for n in range(L + 1)]
    out = [check(f"preprojective dims N={N}", "ar-sequence", dims == expected,
                 dims=dims, expected=expected)]
    out += gamma_check(chain, build_slices(N, cap, F), cap)
    out += [reflection_check(chain, n, seed=cfg.seed) for n in range(1, L - 1)]
    return out


def cmd_purity(cfg: RunConfig) -> List[Check]:
    return purity_witnesses(build_preproj(cfg.N, cfg.length, cfg.field))


def cmd_preinj(cfg: RunConfig) -> List[Check]:
    N, F, L = cfg.N, cfg.field, cfg.length
    chain = build_preinj(N, L, F)
    rec = recurrence_dims(N, L)
    dims = [[r.d0, r.d1] for r in chain.reps]
    expected = [[rec[n], rec[n - 1] if n else 0] for n in range(L + 1)]
    out = [check(f"preinjective dims N={N}", "preinjective-chain", dims == expected,
                 dims=dims, expected=expected)]
    out += [check_lemma_surj(chain, n) for n in range(0, min(L - 1, 5) + 1)]
    out.append(_euler_check(cfg, 20))
    return out


def _euler_check(cfg: RunConfig, pairs: int) -> Check:
    rng = np.random.default_rng(cfg.seed)
    bad = []
    for _ in range(pairs):
        d = [int(x) for x in rng.integers(0, 6, size=4)]
        M = random_rep(cfg.N, d[0], d[1], cfg.field, rng)
        Np = random_rep(cfg.N, d[2], d[3], cfg.field, rng)
        lhs = hom_dim(M, Np) - ext1_dim(M, Np)
        rhs = euler_form(M.dim, Np.dim, cfg.N)
        if lhs != rhs:
            bad.append([d, lhs, rhs])
    return check(f"euler identity N={cfg.N}", "euler-form", not bad, pairs=pairs, mismatches=bad)


def _torsion_modules(cfg: RunConfig) -> List[KronRep]:
    if cfg.module_file is not None:
        return [load_module(cfg.module_file, cfg.field, cfg.N)]
    rng = np.random.default_rng(cfg.seed)
    out = []
    for _ in range(cfg.random_count):
        d0, d1 = (int(x) for x in rng.integers(0, 7, size=2))
        out.append(random_rep(cfg.N, d0, d1, cfg.field, rng))
    return out


def cmd_torsion(cfg: RunConfig) -> List[Check]:
    N, F, cap = cfg.N, cfg.field, cfg.torsion_cap
    model = RingPreinj(N, cap, F)
    out = []
    for k, M in enumerate(_torsion_modules(cfg)):
        st = torsion_stabilize(M, model, cap)
        out.append(check(f"torsion stabilization #{k} dim=({M.d0},{M.d1})",
                         "torsion-stabilization", st.ok, **st.to_numbers()))
        n = st.n0 if st.n0 is not None else cap
        tp = torsion_decompose(M, model, n)
        out.append(check(f"torsion pair #{k} n={n}", "torsion-pair",
                         tp.exact and tp.hom_to_free_part == 0,
                         n=n, t=[tp.t.d0, tp.t.d1], f=[tp.f.d0, tp.f.d1], exact=tp.exact,
                         hom_to_free_part=tp.hom_to_free_part))
        out.append(canonical_sequence_check(M, seed=cfg.seed + k))
    return out


def cmd_mesh(cfg: RunConfig) -> List[Check]:
    window = min(6, cfg.length)
    chain = build_preproj(cfg.N, window, cfg.field)
    return compare_mesh_vs_modules(cfg.N, window, chain, compositions=cfg.full)


def cmd_qgr(cfg: RunConfig) -> List[Check]:
    N, F = cfg.N, cfg.field
    hi = cfg.cap_deg or default_hi(N)
    slices = build_slices(N, hi + 1, F)
    rec = recurrence_dims(N, 4)
    out = []
    for d in QGR_DEGREES:
        q = qgr_R_hom(N, d, slices, hi=hi, field=F)
        want = rec[d] if d >= 0 else 0
        out.append(check(f"Hom_qgr(R, R({d})) N={N}", "qgr-hom",
                         q.stabilized and q.value == want, expected=want, **q.to_numbers()))
    out += tilting_check(N, hi=hi, field=F, slices=slices)
    cap = min(hi, cfg.length - 1)
    chain = build_preproj(N, cap + 1, F)
    out += [gamma_star_check(w, chain, cap, slices, seed=cfg.seed) for w in ("P1", "P0")]
    return out


COMMANDS: Dict[str, Callable[[RunConfig], List[Check]]] = {
    "hilbert": cmd_hilbert, "gamma": cmd_gamma, "purity": cmd_purity, "preinj": cmd_preinj,
    "torsion": cmd_torsion, "mesh": cmd_mesh, "qgr": cmd_qgr,
}


SUITE = tuple(COMMANDS)


def cmd_all(cfg: RunConfig) -> List[Check]:
    out = []
    for name in SUITE:
        out += COMMANDS[name](cfg)
    return out


COMMANDS["all"] = cmd_all


def run(command: str, cfg: RunConfig) -> Report:
    t = time.perf_counter()
    checks = COMMANDS[command](cfg)
    return Report(command, cfg, checks, time.perf_counter() - t)


# ---------------------------------------------------------------- plumbing

def load_module(path: str, field: FieldSpec, N: Optional[int] = None) -> KronRep:
    """Read a representation file, turning every problem into a UsageError
    that names the file and, for syntax errors, the line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"{path}: cannot read: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        M = KronRep.from_json(data, field)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"{path}: {e}") from None
    if N is not None and M.N != N:
        raise UsageError(f"{path}: module has n={M.N} but --n is {N}")
    return M


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="number of arrows N (>= 2)")
    common.add_argument("--field", default="fp:32003", help="q or fp:<p> (default fp:32003)")
    common.add_argument("--cap-deg", type=int, default=None,
                        help="degree cap (hilbert n_max, gamma degree, qgr truncation)")
    common.add_argument("--cap-len", type=int, default=None, help="chain length cap")
    common.add_argument("--seed", type=int, default=0, help="seed for random modules")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--strict", action="store_true",
                        help="full checks (adds composition ranks to mesh)")
    common.add_argument("--module", default=None, help="torsion: representation JSON file")
    common.add_argument("--random", type=int, default=10, help="torsion: number of random modules")
    common.add_argument("--torsion-cap", type=int, default=10, help="torsion: largest n")
    parser = argparse.ArgumentParser(prog="kronrho", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kronrho {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} checks")
    return parser


def config_from_args(args) -> RunConfig:
    try:
        field = FieldSpec.from_string(args.field)
    except ValueError as e:
        raise UsageError(f"--field: {e}") from None
    return RunConfig(N=args.n, field=field, cap_deg=args.cap_deg, cap_len=args.cap_len,
                     seed=args.seed, output="json" if args.json else "text",
                     strictness="full" if args.strict else "dims",
                     torsion_cap=args.torsion_cap, random_count=args.random,
                     module_file=args.module)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.module_file is not None:
            load_module(cfg.module_file, cfg.field, cfg.N)
        report = run(args.command, cfg)
    except UsageError as e:
        print(f"kronrho: error: {e}", file=sys.stderr)
        return 2
    if cfg.output == "json":
        print(report.dumps())
        print(f"wall time: {report.wall_time:.2f} s", file=sys.stderr)
    else:
        print(report.text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

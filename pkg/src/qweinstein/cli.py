"""Command-line front end: dataset I/O, fixture generation, transform
execution and theorem-level verification suites.

Exit codes: 0 ok, 1 usage or parse error, 2 numerical diagnostics
(divergence, taint exhaustion), 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .qcore import (
    DEFAULT_POLICY,
    DivergenceError,
    QDomainError,
    QParams,
    TaintError,
    TruncationPolicy,
)
from .qops import EVEN, GridFunction, LatticeWindow
from .qintegrate import lp_norm
from .transform import (
    embed_zeros,
    forward,
    identity_suite,
    inverse,
    orthogonality_check,
)
from .paleywiener import (
    PWmParams,
    bandwidth_estimate,
    monomial_derivative_bound_check,
    radial_power_bound_check,
    pw_m_sup,
    sonine_identity_check,
    support_radius,
    weinstein_sup_bound_check,
)

FORMAT_VERSION = 1


class FileFormatError(ValueError):
    """Malformed grid-function file; message carries the line number."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class JobConfig:
    q: float = 0.5
    alpha: float = 0.0
    seed: int = 1
    tol: float = 1e-6
    n1_min: int | None = None
    n1_max: int | None = None
    n2_min: int | None = None
    n2_max: int | None = None
    product_tol: float = 1e-16
    series_tol: float = 1e-17
    sum_n_min: int = -40
    sum_n_max: int = 120
    fmt: str = "csv"
    N: int = 20

    def params(self) -> QParams:
        return QParams(q=self.q, alpha=self.alpha)

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(n_min=self.sum_n_min, n_max=self.sum_n_max,
                                product_tol=self.product_tol, series_tol=self.series_tol)

    def window(self) -> LatticeWindow | None:
        vals = (self.n1_min, self.n1_max, self.n2_min, self.n2_max)
        if all(v is None for v in vals):
            return None
        if any(v is None for v in vals):
            raise QDomainError("window needs all four bounds")
        return LatticeWindow(*vals)

    def to_file(self, path: str):
        with open(path, "w") as fh:
            for f in fields(self):
                v = getattr(self, f.name)
                if v is not None:
                    fh.write(f"{f.name}={v}\n")

    @staticmethod
    def from_file(path: str) -> "JobConfig":
        cfg = JobConfig()
        types = {f.name: f.type for f in fields(cfg)}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise FileFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, val = line.split("=", 1)
                key = key.strip()
                val = val.strip()
                if key not in types:
                    raise FileFormatError(f"{path}:{lineno}: unknown key {key!r}")
                cur = getattr(cfg, key)
                if key in ("fmt",):
                    setattr(cfg, key, val)
                elif key in ("seed", "N", "sum_n_min", "sum_n_max") or key.startswith(("n1_", "n2_")):
                    setattr(cfg, key, int(val))
                else:
                    setattr(cfg, key, float(val))
        return cfg


# ---------------------------------------------------------------------------
# grid-function files
# ---------------------------------------------------------------------------

def write_gridfunction(f: GridFunction, path: str, fmt: str = "csv"):
    """Sparse on-disk form: only nonzero points, absent points are zero."""
    w = f.window
    rows = []
    for s_idx, sgn in ((0, 1), (1, -1)):
        for i1, n1 in enumerate(range(w.n1_min, w.n1_max + 1)):
            for i2, n2 in enumerate(range(w.n2_min, w.n2_max + 1)):
                v = f.samples[s_idx, i1, i2]
                if v != 0:
                    rows.append((sgn, n1, n2, float(v.real), float(v.imag)))
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(f"# qweinstein v{FORMAT_VERSION} q={f.params.q} alpha={f.params.alpha} "
                     f"parity={f.parity_y} n1=[{w.n1_min},{w.n1_max}] n2=[{w.n2_min},{w.n2_max}]\n")
            fh.write("sign,n1,n2,re,im\n")
            for r in rows:
                fh.write(f"{r[0]},{r[1]},{r[2]},{r[3]!r},{r[4]!r}\n")
    elif fmt == "json":
        doc = {
            "format": "qweinstein",
            "version": FORMAT_VERSION,
            "q": f.params.q,
            "alpha": f.params.alpha,
            "parity": f.parity_y,
            "n1": [w.n1_min, w.n1_max],
            "n2": [w.n2_min, w.n2_max],
            "points": [list(r) for r in rows],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
    else:
        raise FileFormatError(f"unknown format {fmt!r}")


def _parse_header(line: str, path: str) -> dict:
    if not line.startswith("# qweinstein"):
        raise FileFormatError(f"{path}:1: missing '# qweinstein' header")
    toks = line[1:].split()
    out = {}
    if len(toks) < 2 or not toks[1].startswith("v"):
        raise FileFormatError(f"{path}:1: missing format version")
    try:
        out["version"] = int(toks[1][1:])
    except ValueError as exc:
        raise FileFormatError(f"{path}:1: bad version {toks[1]!r}") from exc
    for tok in toks[2:]:
        if "=" not in tok:
            raise FileFormatError(f"{path}:1: bad header token {tok!r}")
        k, v = tok.split("=", 1)
        if k in ("q", "alpha"):
            out[k] = float(v)
        elif k == "parity":
            out[k] = v
        elif k in ("n1", "n2"):
            v = v.strip("[]")
            lo, hi = v.split(",")
            out[k] = (int(lo), int(hi))
        else:
            raise FileFormatError(f"{path}:1: unknown header key {k!r}")
    for need in ("q", "alpha", "parity", "n1", "n2"):
        if need not in out:
            raise FileFormatError(f"{path}:1: header missing {need!r}")
    return out


def read_gridfunction(path: str) -> GridFunction:
    if path.endswith(".json"):
        return _read_json(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FileFormatError(f"{path}:1: empty file")
    hdr = _parse_header(lines[0], path)
    params = QParams(q=hdr["q"], alpha=hdr["alpha"])
    window = LatticeWindow(hdr["n1"][0], hdr["n1"][1], hdr["n2"][0], hdr["n2"][1])
    arr = np.zeros(window.shape, dtype=np.complex128)
    seen = set()
    start = 1
    if len(lines) > 1 and lines[1].replace(" ", "") == "sign,n1,n2,re,im":
        start = 2
    for lineno, line in enumerate(lines[start:], start + 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise FileFormatError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            sgn = int(parts[0])
            n1 = int(parts[1])
            n2 = int(parts[2])
            re = float(parts[3])
            im = float(parts[4])
        except ValueError as exc:
            raise FileFormatError(f"{path}:{lineno}: unparsable row: {line!r}") from exc
        if sgn not in (1, -1):
            raise FileFormatError(f"{path}:{lineno}: sign must be 1 or -1")
        if not (window.n1_min <= n1 <= window.n1_max and window.n2_min <= n2 <= window.n2_max):
            raise FileFormatError(f"{path}:{lineno}: point ({sgn},{n1},{n2}) outside window")
        key = (sgn, n1, n2)
        if key in seen:
            raise FileFormatError(f"{path}:{lineno}: duplicate point {key}")
        seen.add(key)
        arr[0 if sgn == 1 else 1, n1 - window.n1_min, n2 - window.n2_min] = complex(re, im)
    return GridFunction(params, window, hdr["parity"], arr)


def _read_json(path: str) -> GridFunction:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    for need in ("q", "alpha", "parity", "n1", "n2", "points"):
        if need not in doc:
            raise FileFormatError(f"{path}:1: JSON missing field {need!r}")
    params = QParams(q=doc["q"], alpha=doc["alpha"])
    window = LatticeWindow(doc["n1"][0], doc["n1"][1], doc["n2"][0], doc["n2"][1])
    arr = np.zeros(window.shape, dtype=np.complex128)
    seen = set()
    for idx, row in enumerate(doc["points"]):
        if len(row) != 5:
            raise FileFormatError(f"{path}: point {idx}: expected 5 entries")
        sgn, n1, n2, re, im = row
        key = (sgn, n1, n2)
        if key in seen:
            raise FileFormatError(f"{path}: point {idx}: duplicate {key}")
        seen.add(key)
        arr[0 if sgn == 1 else 1, int(n1) - window.n1_min, int(n2) - window.n2_min] = complex(re, im)
    return GridFunction(params, window, doc["parity"], arr)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def random_even_bump(params: QParams, support: LatticeWindow, seed: int,
                     pad: int = 0, complex_values: bool = True) -> GridFunction:
    """Seeded random compactly supported even grid function.

    Values are standard complex gaussians on the support window; the pad
    embeds the support in a larger window of exact zeros.
    """
    rng = np.random.default_rng(seed)
    shape = support.shape
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape) if complex_values else 0.0
    arr = re + 1j * im
    f = GridFunction(params, support, EVEN, arr)
    if pad:
        f = embed_zeros(f, pad, pad)
    return f


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_gen(args, cfg: JobConfig) -> int:
    params = cfg.params()
    sup = LatticeWindow(*(int(v) for v in args.support.split(",")))
    f = random_even_bump(params, sup, cfg.seed)
    write_gridfunction(f, args.out, cfg.fmt)
    print(f"wrote {args.out} (support {sup.n1_min}..{sup.n1_max} x {sup.n2_min}..{sup.n2_max}, "
          f"seed {cfg.seed})")
    return 0


def _cmd_transform(args, cfg: JobConfig) -> int:
    # stored windows are supports: absent points are zeros, so the input is
    # embedded in a zero margin before transforming
    f = embed_zeros(read_gridfunction(args.input), 1, 1)
    policy = cfg.policy()
    window = cfg.window()
    if args.direction == "forward":
        res = forward(f, lambda_window=window, policy=policy, auto_tol=cfg.tol * 1e-4)
    else:
        res = inverse(f, x_window=window, policy=policy, auto_tol=cfg.tol * 1e-4,
                      edge_tol=math.inf)
    print(f"tail_bound={res.tail_bound:.3e}", file=sys.stderr)
    write_gridfunction(res.grid, args.out, cfg.fmt)
    return 0


def _cmd_bandwidth(args, cfg: JobConfig) -> int:
    F = read_gridfunction(args.input)
    if args.N < 1:
        raise FileFormatError("bandwidth: N must be >= 1")
    rep = bandwidth_estimate(F, args.N, cfg.policy(), x_window=cfg.window())
    print(f"estimate={rep.estimate:.8g}")
    print(f"oracle_radius={rep.oracle_radius:.8g}")
    print(f"n_used={rep.n_used}")
    print(f"route_max_rel_dev={rep.route_max_rel_dev:.3e}")
    print(f"exponent_normalization={rep.exponent_normalization}")
    if args.out:
        if cfg.fmt == "json":
            with open(args.out, "w") as fh:
                json.dump({"n": list(range(1, rep.n_used + 1)),
                           "a_n_literal": rep.a_seq_literal,
                           "a_n_spectral": rep.a_seq,
                           "estimate": rep.estimate,
                           "oracle_radius": rep.oracle_radius}, fh, indent=1)
        else:
            with open(args.out, "w") as fh:
                fh.write("n,a_n_literal,a_n_spectral\n")
                for i in range(rep.n_used):
                    fh.write(f"{i + 1},{rep.a_seq_literal[i]!r},{rep.a_seq[i]!r}\n")
    return 0


def _suite_plancherel(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    policy = cfg.policy()
    lam_win = cfg.window()
    out = []
    for i in range(4):
        f = random_even_bump(params, LatticeWindow(-2, 4, -2, 4), cfg.seed + i, pad=1)
        F = forward(f, lambda_window=lam_win, policy=policy)
        ratio = lp_norm(F.grid, 2.0, policy) / lp_norm(f, 2.0, policy)
        out.append((f"plancherel[seed={cfg.seed + i},tail={F.tail_bound:.1e}]",
                    abs(ratio - 1.0), cfg.tol))
        back = inverse(F.grid, x_window=f.window, policy=policy, edge_tol=math.inf)
        diff = f.with_samples(back.grid.samples - f.samples)
        out.append((f"inversion[seed={cfg.seed + i}]",
                    lp_norm(diff, 2.0, policy) / lp_norm(f, 2.0, policy), cfg.tol))
    return out


def _suite_identities(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    policy = cfg.policy()
    f = random_even_bump(params, LatticeWindow(-2, 3, -2, 3), cfg.seed)
    g = random_even_bump(params, LatticeWindow(-2, 3, -2, 3), cfg.seed + 1000)
    rep = identity_suite(f, g, policy=policy)
    tol = max(cfg.tol, 1e-7)
    return [(k, v, tol) for k, v in rep.items()]


def _suite_orthogonality(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    policy = cfg.policy()
    x = (1, 1, 0)
    res_d = orthogonality_check(x, x, params, policy)
    rel = abs(res_d.value / res_d.predicted_diagonal - 1.0)
    out = [("orthogonality-diagonal", rel, max(cfg.tol, 1e-3))]
    y = (1, 3, 2)
    res_o = orthogonality_check(x, y, params, policy)
    out.append(("orthogonality-offdiag(rel to diagonal)",
                abs(res_o.value) / res_d.predicted_diagonal, max(cfg.tol, 1e-3)))
    return out


def _suite_sonine(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    policy = cfg.policy()
    out = []
    for alpha, p in ((0.0, 1), (0.5, 2)):
        err = sonine_identity_check(alpha, p, list(range(-2, 5)), params, policy)
        out.append((f"sonine[alpha={alpha},p={p}]", err, max(cfg.tol, 1e-8)))
    return out


def _suite_bounds(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    out = []
    for i in range(3):
        f = random_even_bump(params, LatticeWindow(0, 3, 0, 3), cfg.seed + i, pad=2)
        lhs, rhs, _ = monomial_derivative_bound_check(f, 3, 3, 1, 1, 2)
        out.append((f"monomial-bound[seed={cfg.seed + i}]",
                    lhs / rhs if rhs > 0 else 0.0, 1.0))
        lhs, rhs, _ = radial_power_bound_check(f, 3, 1, 1, 1)
        out.append((f"radial-bound[seed={cfg.seed + i}]",
                    lhs / rhs if rhs > 0 else 0.0, 1.0))
        lhs, rhs, _ = weinstein_sup_bound_check(f, 2)
        out.append((f"weinstein-sup-bound[seed={cfg.seed + i}]",
                    lhs / rhs if rhs > 0 else 0.0, 1.0))
    return out


def _suite_pw_m(cfg: JobConfig) -> list[tuple[str, float, float]]:
    params = cfg.params()
    policy = cfg.policy()
    f = random_even_bump(params, LatticeWindow(-1, 3, -1, 3), cfg.seed, pad=1)
    R = support_radius(f)
    m = int(math.ceil(params.alpha + 1.5)) + 1
    a = R / params.q ** (4 * m)
    F = forward(f, policy=policy)
    pw = PWmParams(m=m, a=a, N=2 * m + 10)
    sup, per_n = pw_m_sup(F.grid, pw, policy, f_hat=f)
    finite = 0.0 if (math.isfinite(sup) and sup < 1e12) else 1.0
    out = [("pw-m-finite", finite, 0.5)]
    run = []
    best = 0.0
    for v in per_n:
        best = max(best, v)
        run.append(best)
    incs = [run[i + 1] - run[i] for i in range(len(run) - 1)]
    nonmono = 0.0
    for i in range(len(incs) - 1):
        if incs[i + 1] > incs[i] + 1e-12 * max(1.0, run[-1]):
            nonmono = 1.0
    out.append(("pw-m-increments-nonincreasing", nonmono, 0.5))
    return out


_SUITES = {
    "plancherel": _suite_plancherel,
    "identities": _suite_identities,
    "orthogonality": _suite_orthogonality,
    "sonine": _suite_sonine,
    "bounds": _suite_bounds,
    "pw-m": _suite_pw_m,
}


def _cmd_verify(args, cfg: JobConfig) -> int:
    suite = _SUITES[args.suite]
    rows = suite(cfg)
    failed = []
    for name, err, tol in rows:
        status = "ok" if err <= tol else "FAIL"
        print(f"{name}: max_rel_err={err:.3e} tol={tol:.1e} [{status}]")
        if err > tol:
            failed.append(name)
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    # the shared flags are accepted both before and after the subcommand;
    # SUPPRESS defaults keep an unset later occurrence from clobbering an
    # earlier one
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS,
                        help="key=value config file; flags override it")
    shared.add_argument("--q", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--alpha", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--window", default=argparse.SUPPRESS,
                        help="n1_min,n1_max,n2_min,n2_max (use --window=... for negatives)")
    shared.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="qweinstein", parents=[shared],
                                 description="q-Weinstein transform toolkit on the q-lattice")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[shared],
                       help="generate a seeded random compactly supported function")
    g.add_argument("--support", required=True, help="n1_min,n1_max,n2_min,n2_max")
    g.add_argument("--out", required=True)

    t = sub.add_parser("transform", parents=[shared],
                       help="apply the forward or inverse transform")
    t.add_argument("--input", required=True)
    t.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    t.add_argument("--out", required=True)

    b = sub.add_parser("bandwidth", parents=[shared],
                       help="estimate the preimage support radius")
    b.add_argument("--input", required=True)
    b.add_argument("--N", type=int, default=20)
    b.add_argument("--out")

    v = sub.add_parser("verify", parents=[shared], help="run a named verification suite")
    v.add_argument("--suite", required=True, choices=sorted(_SUITES))
    return ap


def _merge_config(args) -> JobConfig:
    config_path = getattr(args, "config", None)
    cfg = JobConfig.from_file(config_path) if config_path else JobConfig()
    for key in ("q", "alpha", "seed", "tol", "fmt"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    window = getattr(args, "window", None)
    if window:
        parts = [int(v) for v in window.split(",")]
        if len(parts) != 4:
            raise FileFormatError("--window needs four comma-separated integers")
        cfg.n1_min, cfg.n1_max, cfg.n2_min, cfg.n2_max = parts
    return cfg


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = _merge_config(args)
        if args.command == "gen":
            return _cmd_gen(args, cfg)
        if args.command == "transform":
            return _cmd_transform(args, cfg)
        if args.command == "bandwidth":
            return _cmd_bandwidth(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        raise FileFormatError(f"unknown command {args.command!r}")
    except (FileFormatError, QDomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DivergenceError, TaintError, ArithmeticError) as exc:
        print(f"numerical diagnostic: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

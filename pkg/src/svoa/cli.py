"""Command-line front end: ``svoa <subcommand> [flags]``.

Exit status is 0 when every verdict passes, 1 when some check fails and 2
on usage or configuration errors.  Reports are rendered as text or as JSON
(schema ``svoa-report/1``); all numbers are exact strings except the
asymptotic ratio.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

REPORT_SCHEMA = "svoa-report/1"
CACHE_SCHEMA = 1


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# configuration

DEFAULTS = {
    "y_choice": "1",
    "lattice": "II91",
    "height": "6",
    "r": "1,1,0,0,0,0,0,0,0,2",
    "window": "-1,3",
    "axiom_budget": "12",
    "cache_dir": str(Path.home() / ".cache" / "svoa"),
    "cache": "on",
    "format": "text",
}


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in DEFAULTS:
            raise UsageError(f"config line {lineno}: unknown key {k!r}")
        out[k] = v
    return out


def load_config(path: str | None, flags: dict, environ=None) -> dict:
    """defaults < environment (SVOA_*) < config file < flags."""
    environ = os.environ if environ is None else environ
    cfg = dict(DEFAULTS)
    for k in DEFAULTS:
        v = environ.get("SVOA_" + k.upper())
        if v is not None:
            cfg[k] = v
    path = path or environ.get("SVOA_CONFIG")
    if path:
        try:
            cfg.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
    cfg.update({k: str(v) for k, v in flags.items() if v is not None})
    if cfg["format"] not in ("text", "json"):
        raise UsageError("format must be text or json")
    if cfg["cache"] not in ("on", "off"):
        raise UsageError("cache must be on or off")
    if cfg["lattice"] != "II91":
        raise UsageError("only the II91 lattice preset is available")
    try:
        int(cfg["y_choice"]), int(cfg["height"]), int(cfg["axiom_budget"])
    except ValueError as exc:
        raise UsageError(f"malformed integer in config: {exc}") from exc
    return cfg


# ----------------------------------------------------------------------
# reports

def exact(x):
    """Render payload values as JSON-friendly exact data."""
    from .exactfield import Cyc, render
    from .fock import State
    if isinstance(x, bool) or x is None or isinstance(x, (int, str, float)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Cyc):
        return render(x)
    if isinstance(x, State):
        return str(x)
    if isinstance(x, dict):
        return {str(k): exact(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [exact(v) for v in x]
    return str(x)


@dataclass
class Check:
    name: str
    passed: bool
    payload: dict = field(default_factory=dict)
    seconds: float | None = None

    def to_json(self, timing: bool) -> dict:
        d = {"name": self.name, "passed": bool(self.passed), "payload": exact(self.payload)}
        if timing and self.seconds is not None:
            d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class Report:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self, timing: bool = False) -> dict:
        return {"schema": REPORT_SCHEMA, "suite": self.suite, "passed": self.passed,
                "checks": [c.to_json(timing) for c in self.checks]}

    def render(self, fmt: str, timing: bool = False) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(timing), indent=2, sort_keys=True)
        lines = []
        for c in self.checks:
            body = json.dumps(exact(c.payload), sort_keys=True)
            t = f" [{c.seconds:.2f}s]" if timing and c.seconds is not None else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {self.suite}/{c.name}{t}: {body}")
        lines.append(f"{self.suite}: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _timed(name, fn):
    t = time.perf_counter()
    passed, payload = fn()
    return Check(name, passed, payload, time.perf_counter() - t)


# ----------------------------------------------------------------------
# cache: content-addressed JSON files

class ReportCache:
    def __init__(self, directory: str, enabled: bool = True):
        self.dir = Path(directory)
        self.enabled = enabled

    def key(self, suite: str, params: dict) -> str:
        raw = json.dumps({"v": CACHE_SCHEMA, "suite": suite, "params": params}, sort_keys=True)
        return hashlib.sha256(raw.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    @staticmethod
    def _digest(body) -> str:
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()

    def get(self, key: str):
        if not self.enabled:
            return None
        p = self._path(key)
        try:
            blob = json.loads(p.read_text())
        except (OSError, ValueError):
            return None
        if (not isinstance(blob, dict) or blob.get("version") != CACHE_SCHEMA
                or blob.get("hash") != self._digest(blob.get("report"))):
            return None          # corrupt or stale: recompute
        return blob["report"]

    def put(self, key: str, report: dict) -> None:
        if not self.enabled:
            return
        self.dir.mkdir(parents=True, exist_ok=True)
        blob = {"version": CACHE_SCHEMA, "key": key, "hash": self._digest(report), "report": report}
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(blob, sort_keys=True))
        tmp.replace(self._path(key))

    def entries(self) -> list[dict]:
        out = []
        if not self.dir.is_dir():
            return out
        for p in sorted(self.dir.glob("*.json")):
            try:
                blob = json.loads(p.read_text())
                ok = blob.get("hash") == self._digest(blob.get("report"))
                suite = blob.get("report", {}).get("suite")
            except (OSError, ValueError, AttributeError):
                ok, suite = False, None
            out.append({"file": p.name, "suite": suite, "valid": ok, "bytes": p.stat().st_size})
        return out

    def clear(self) -> int:
        n = 0
        if self.dir.is_dir():
            for p in self.dir.glob("*.json"):
                p.unlink()
                n += 1
        return n


# ----------------------------------------------------------------------
# argument helpers

def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc


def default_momentum(norm: int):
    """A vector of II_{9,1} with the given even norm: (k, 1, 0, ..., 0; k+1) has norm -2k."""
    from . import lattice as lt
    if norm % 2:
        raise UsageError("II_{9,1} is even: the norm must be even")
    if norm > 0:
        k = norm // 2
        return lt.lx_vector([k, 1] + [0] * 7 + [k - 1])
    k = -norm // 2
    return lt.lx_vector([k, 1] + [0] * 7 + [k + 1])


def momentum(args):
    from . import lattice as lt
    if args.alpha is not None:
        xs = _fractions(args.alpha)
        if len(xs) != 10:
            raise UsageError("--alpha needs 10 coordinates")
        v = lt.lx_vector(xs)
        if not lt.in_ii91(v[:10]):
            raise UsageError("--alpha is not in II_{9,1}")
        return v
    if args.norm is not None:
        return default_momentum(args.norm)
    raise UsageError("give --alpha or --norm")


def _window(text: str) -> tuple[int, int]:
    xs = _fractions(text)
    if len(xs) != 2 or any(x.denominator != 1 for x in xs):
        raise UsageError("window must be 'lo,hi'")
    return int(xs[0]), int(xs[1])


# ----------------------------------------------------------------------
# subcommands: each returns (list of checks, params used for caching)

def cmd_ope_table(args, cfg):
    from .fields import OPE_TABLE, central_charge, verify_ope
    checks = []
    for a, b in OPE_TABLE:
        checks.append(_timed(f"{a}x{b}", lambda a=a, b=b: (
            lambda r: (r.equal, {"mismatches": r.mismatches}))(verify_ope(a, b))))
    expected = {"omega_M": 15, "omega_Gh": -15, "omega_phi": 13, "omega_chi": -2,
                "omega_sigma": -26, "omega": 0}
    for w, c in expected.items():
        checks.append(_timed(f"c({w})", lambda w=w, c=c: (
            lambda v: (v == c, {"central_charge": v, "expected": c}))(central_charge(w))))
    return checks


def cmd_brst_check(args, cfg):
    from .brst import brst_operator
    from .fields import registry
    Q = brst_operator()
    reg = registry()

    def cert():
        r = Q.nilpotency_certificate()
        return r.equal, {"terms_Qj": len(r.q_j), "terms_Dv": len(r.d_v)}

    def squares():
        names = ["b", "c", "beta", "gamma", "xi", "eta", "P1", "Qdot0", "tau_M"]
        bad = [n for n in names if not Q.squared(reg.get(n)).is_zero()]
        return not bad, {"states": names, "failures": bad}

    def decomposition():
        names = ["b", "c", "P1", "Qdot0", "X"]
        bad = [n for n in names if not Q.decomposition_holds(reg.get(n))]
        return not bad, {"states": names, "failures": bad}

    return [_timed("certificate", cert), _timed("Q_squared", squares),
            _timed("Q_decomposition", decomposition)]


def cmd_sector(args, cfg):
    from .smallspace import SectorSpec, enumerate_sector
    alpha = momentum(args)
    p = Fraction(args.picture)
    basis = enumerate_sector(SectorSpec(alpha, p, args.ghost))
    return [Check("dimension", True, {"alpha": _alpha_str(alpha), "picture": p,
                                      "ghost": args.ghost, "dim": basis.dim})]


def _alpha_str(alpha):
    from . import lattice as lt
    return [str(x) for x in lt.coords(alpha)[:10]]


def _expected_dims(alpha, p, window):
    """Dimensions fixed by the vanishing theorem and c(n), when known."""
    from . import lattice as lt
    from .gkm import c_series
    n2 = lt.norm(alpha)
    if not any(alpha) or n2 > 0 or p not in (Fraction(-1), Fraction(-1, 2)):
        return None
    lvl = int(-n2 / 2)
    c = int(c_series(lvl)[lvl])
    return {n: (c if n == 1 else 0) for n in range(window[0], window[1] + 1)}


def cmd_cohomology(args, cfg):
    from .cohomology import cohomology_dims
    alpha = momentum(args)
    p = Fraction(args.picture)
    window = _window(args.window or cfg["window"])

    def run():
        dims = cohomology_dims(alpha, p, window)
        exp = _expected_dims(alpha, p, window)
        if exp is None and not any(alpha) and p == -1:
            exp = {n: (10 if n == 1 else dims[n]) for n in dims}
        ok = exp is None or dims == exp
        return ok, {"alpha": _alpha_str(alpha), "picture": p, "dims": dims, "expected": exp}

    return [_timed("dims", run)]


def cmd_euler_poincare(args, cfg):
    from .cohomology import euler_poincare_dim
    alpha = momentum(args)

    def run():
        r = euler_poincare_dim(alpha)
        return r["equal"], {"alpha": _alpha_str(alpha), **r}

    return [_timed("euler_poincare", run)]


def cmd_gamma_check(args, cfg):
    from .cohomology import clifford_report, susy_ope_check

    def cliff():
        r = clifford_report()
        keys = ["anticommutator", "gamma11_diagonal", "C_antisymmetric", "C_invertible",
                "C_conjugation", "GammaC_symmetric"]
        return all(r[k] for k in keys), {k: r[k] for k in keys}

    return [_timed("clifford", cliff),
            _timed("susy_ope", lambda: (susy_ope_check(), {}))]


def parse_element(text: str):
    """'P<mu>', 'Q<k>' or 'root:<10 coords>:<parity>:<index>'."""
    from . import lattice as lt
    from . import physalg as P
    text = text.strip()
    try:
        if text.startswith("P") and text[1:].isdigit():
            mu = int(text[1:])
            if not 1 <= mu <= 10:
                raise UsageError("P index must be 1..10")
            return P.p_element(mu)
        if text.startswith("Q") and text[1:].isdigit():
            k = int(text[1:])
            if not 0 <= k < 16:
                raise UsageError("Q index must be 0..15")
            return P.q_element(k)
        if text.startswith("root:"):
            _, coords, parity, index = text.split(":")
            xs = _fractions(coords)
            if len(xs) != 10:
                raise UsageError("root momentum needs 10 coordinates")
            alpha = lt.lx_vector(xs)
            reps = P.root_space(alpha, int(parity))
            return reps[int(index)]
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad element {text!r}: {exc}") from exc
    raise UsageError(f"bad element {text!r}")


def cmd_bracket(args, cfg):
    from . import physalg as P
    u, v = parse_element(args.u), parse_element(args.v)

    def run():
        r = P.bracket(u, v)
        return True, {"alpha": _alpha_str(r.alpha), "picture": r.picture, "class": r.coords}

    return [_timed("bracket", run)]


def cmd_susy_check(args, cfg):
    from . import physalg as P

    def susy():
        r = P.susy_checks()
        return all(r.values()), r

    def momentum_action():
        from . import lattice as lt
        a = lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
        els = P.root_space(a, 0)[:2] + P.root_space(a, 1)[:2]
        ok = all(P.momentum_action_check(x) for x in els)
        return ok, {"alpha": _alpha_str(a), "elements": len(els)}

    return [_timed("susy_algebra", susy), _timed("momentum_action", momentum_action)]


def cmd_jacobi_check(args, cfg):
    from . import physalg as P
    budget = int(args.budget or cfg["axiom_budget"])

    def run():
        els = P.axiom_sample()[:budget]
        r = P.axiom_suite(els)
        return r.passed, {"elements": len(els), "pairs": r.pairs, "triples": r.triples,
                          "antisymmetry_failures": r.antisymmetry_failures,
                          "jacobi_failures": r.jacobi_failures}

    return [_timed("axioms", run)]


def cmd_qseries(args, cfg):
    from . import gkm
    N = args.order
    if N < 0:
        raise UsageError("--order must be >= 0")
    fn = {"c": gkm.c_series, "a": gkm.a_series,
          "phi": lambda n: gkm.euler_phi(n),
          "trace": gkm.trace_closed_form}[args.kind]
    coeffs = fn(N).integers()
    known = {"c": [8, 128, 1152, 7680, 42112], "a": [1, -16, 112, -448]}.get(args.kind)
    ok = known is None or coeffs[: len(known)] == known[: N + 1]
    return [Check(f"{args.kind}_series", ok, {"order": N, "coefficients": coeffs})]


def cmd_asymptotics(args, cfg):
    from .gkm import asymptotic_ratio
    checks = []
    for n in args.n:
        r = asymptotic_ratio(n, prefactor=args.prefactor)
        ok = r.within if r.within is not None else True
        checks.append(Check(f"n={n}", ok, {"c": r.c, "approximation": r.approximation,
                                           "ratio": round(r.ratio, 12), "tolerance": r.tolerance}))
    return checks


def cmd_trace_identity(args, cfg):
    from .gkm import trace_identity_check

    def run():
        r = trace_identity_check(args.order)
        return r.equal, {"order": r.N, "lattice_side": r.lattice_side, "closed_form": r.closed_form}

    return [_timed("trace_identity", run)]


def _reference(args, cfg):
    from .gkm import parse_reference
    try:
        return parse_reference(args.r or cfg["r"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_denominator_check(args, cfg):
    from .gkm import decode, denominator_check
    r = _reference(args, cfg)
    N = int(args.height if args.height is not None else cfg["height"])

    def run():
        rep = denominator_check(r, N)
        keys = sorted(set(rep.lhs) | set(rep.rhs))
        coeffs = [[[str(Fraction(x, 2)) for x in k], rep.lhs.get(k, 0), rep.rhs.get(k, 0)]
                  for k in keys] if args.coefficients else None
        payload = {"r": [str(Fraction(x, 2)) for x in r], "height": N,
                   "roots": rep.root_count, "primitive_nulls": rep.primitive_nulls,
                   "terms": len(keys), "mismatches": len(rep.mismatches)}
        if coeffs is not None:
            payload["coefficients"] = coeffs
        return rep.equal, payload

    del decode
    return [_timed("denominator_identity", run)]


def cmd_cartan(args, cfg):
    from .gkm import cartan_matrix
    r = _reference(args, cfg)
    N = int(args.height if args.height is not None else 2)
    data = cartan_matrix(r, N)
    payload = {"simple_roots": [[str(Fraction(x, 2)) for x in v] for v in data.simple_roots],
               "checks": data.checks}
    if args.matrix_format == "csv":
        payload["csv"] = "\n".join(",".join(str(x) for x in row) for row in data.matrix)
    else:
        payload["matrix"] = data.matrix
    return [Check("cartan", all(data.checks.values()), payload)]


def cmd_cache(args, cfg):
    cache = ReportCache(cfg["cache_dir"])
    if args.action == "clear":
        return [Check("clear", True, {"removed": cache.clear()})]
    entries = cache.entries()
    return [Check("inspect", all(e["valid"] for e in entries),
                  {"directory": str(cache.dir), "entries": entries})]


COMMANDS = {
    "ope-table": cmd_ope_table,
    "brst-check": cmd_brst_check,
    "sector": cmd_sector,
    "cohomology": cmd_cohomology,
    "euler-poincare": cmd_euler_poincare,
    "gamma-check": cmd_gamma_check,
    "bracket": cmd_bracket,
    "susy-check": cmd_susy_check,
    "jacobi-check": cmd_jacobi_check,
    "qseries": cmd_qseries,
    "asymptotics": cmd_asymptotics,
    "trace-identity": cmd_trace_identity,
    "denominator-check": cmd_denominator_check,
    "cartan": cmd_cartan,
    "cache": cmd_cache,
}
UNCACHED = {"cache", "sector", "qseries", "cartan"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config")
    common.add_argument("--format", choices=["text", "json"])
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--no-cache", action="store_const", const="off", dest="cache")
    common.add_argument("--timing", action="store_true")

    p = _Parser(prog="svoa", description="Exact checks for the compactified superstring vertex algebra.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    for name in ("ope-table", "brst-check", "gamma-check", "susy-check"):
        add(name)
    for name in ("sector", "cohomology", "euler-poincare"):
        sp = add(name)
        sp.add_argument("--alpha", help="ten comma-separated coordinates")
        sp.add_argument("--norm", type=int)
        if name != "euler-poincare":
            sp.add_argument("--picture", default="-1")
        if name == "sector":
            sp.add_argument("--ghost", type=int, default=1)
        if name == "cohomology":
            sp.add_argument("--window")
    sp = add("bracket")
    sp.add_argument("u")
    sp.add_argument("v")
    sp = add("jacobi-check")
    sp.add_argument("--budget", type=int)
    sp = add("qseries")
    sp.add_argument("--kind", choices=["c", "a", "phi", "trace"], default="c")
    sp.add_argument("--order", type=int, default=4)
    sp = add("asymptotics")
    sp.add_argument("--n", type=int, nargs="+", default=[10, 100])
    sp.add_argument("--prefactor", choices=["half", "derived"], default="half")
    sp = add("trace-identity")
    sp.add_argument("--order", type=int, default=8)
    for name in ("denominator-check", "cartan"):
        sp = add(name)
        sp.add_argument("--height", type=int)
        sp.add_argument("--r", help="reference vector, ten comma-separated coordinates")
        if name == "denominator-check":
            sp.add_argument("--coefficients", action="store_true")
        else:
            sp.add_argument("--matrix-format", choices=["json", "csv"], default="json")
    sp = add("cache")
    sp.add_argument("action", choices=["inspect", "clear"])
    return p


def run(argv: list[str], environ=None) -> tuple[int, Report | None, str]:
    """Execute a command line; returns (exit code, report, rendered output)."""
    try:
        args = build_parser().parse_args(argv)
        flags = {"format": args.format, "cache_dir": args.cache_dir, "cache": args.cache}
        cfg = load_config(args.config, flags, environ)
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("config", "format", "cache_dir", "cache", "timing")}
        params["y_choice"] = cfg["y_choice"]
        cache = ReportCache(cfg["cache_dir"], cfg["cache"] == "on" and args.command not in UNCACHED)
        key = cache.key(args.command, {k: str(v) for k, v in params.items()})
        cached = cache.get(key)
        if cached is not None:
            report = Report(cached["suite"], [Check(c["name"], c["passed"], c["payload"])
                                              for c in cached["checks"]])
        else:
            report = Report(args.command, COMMANDS[args.command](args, cfg))
            if cache.enabled:
                cache.put(key, report.to_json(timing=False))
        out = report.render(cfg["format"], args.timing)
        return (0 if report.passed else 1), report, out
    except UsageError as exc:
        return 2, None, f"svoa: error: {exc}"


def main(argv: list[str] | None = None) -> int:
    code, _, out = run(sys.argv[1:] if argv is None else argv)
    print(out, file=sys.stderr if code == 2 else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: ``slope-lab <kind> --config FILE --out FILE [--seed N] [--jobs N]``.

Configs are JSON with every rational written as a ``"p/q"`` string.  Output
is CSV, one row per reported quantity, with byte-stable ordering.  Exit
codes: 0 all checks pass, 1 a mathematical check failed, 2 config or IO
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any

from . import axioms, series, toric
from . import filtration as flt
from .adelic import AdelicCurveSpec, DiagonalAdelicBundle, flag_degree_check, hn_sorted, total_degree
from .errors import ContractError, DomainError, InputError
from .rational import format_decimal, format_rational, parse_rational

KINDS = (
    "slopes", "series-invariants", "chi-vol", "hs-check",
    "cone-scan", "certificate", "fekete", "check-axioms",
)
COLUMNS = ("experiment", "n", "quantity", "value", "value_num", "value_den", "value_decimal", "status", "detail")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class Report:
    """Accumulates CSV rows and the overall pass/fail state."""

    def __init__(self, experiment: str):
        self.experiment = experiment
        self.rows: list = []
        self.failed = False

    def add(self, quantity: str, value: Any = None, n: Any = "", status: str = "ok", detail: str = ""):
        if status == "violation":
            self.failed = True
        text = num = den = dec = ""
        if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
            q = Fraction(value)
            text, num, den, dec = format_rational(q), str(q.numerator), str(q.denominator), format_decimal(q)
        elif isinstance(value, float) and math.isinf(value):
            text = dec = format_rational(value)
        elif value is not None:
            text = str(value)
        self.rows.append((self.experiment, str(n), quantity, text, num, den, dec, status, detail))

    def render(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(self.rows)
        return buf.getvalue()


# ---------------------------------------------------------------------------
# config parsing


def _req(cfg: dict, key: str):
    if key not in cfg:
        raise InputError(f"missing required field {key!r}")
    return cfg[key]


def _q(value) -> Fraction:
    return parse_rational(value)


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(f"{name} must be an integer")
    try:
        return int(value)
    except ValueError:
        raise InputError(f"{name} must be an integer") from None


def parse_curve(cfg) -> AdelicCurveSpec:
    if cfg is None:
        return AdelicCurveSpec.single()
    return AdelicCurveSpec(tuple((p["label"], _q(p["weight"])) for p in _req(cfg, "places")))


def parse_polytope(cfg) -> toric.LatticePolytope:
    verts = [tuple(_q(c) for c in v) for v in _req(cfg, "vertices")]
    return toric.LatticePolytope.hull_of(verts)


def parse_green(cfg, P: toric.LatticePolytope) -> toric.ConcavePLFunction:
    pieces = [(tuple(_q(c) for c in p["a"]), _q(p["b"])) for p in _req(cfg, "pieces")]
    return toric.ConcavePLFunction(P, tuple(pieces))


def parse_divisor(cfg, curve: AdelicCurveSpec) -> toric.ToricAdelicDivisor:
    P = parse_polytope(_req(cfg, "polytope"))
    greens = {label: parse_green(g, P) for label, g in cfg.get("greens", {}).items()}
    return toric.ToricAdelicDivisor.build(P, greens, curve)


def parse_space(cfg) -> flt.FilteredSpace:
    jumps = [_q(j) for j in _req(cfg, "jumps")]
    if "basis" in cfg:
        basis = tuple(tuple(_q(c) for c in row) for row in cfg["basis"])
    else:
        basis = tuple(tuple(Fraction(int(i == j)) for j in range(len(jumps))) for i in range(len(jumps)))
    return flt.FilteredSpace(basis, tuple(jumps))


def parse_series(cfg, curve: AdelicCurveSpec) -> series.MonomialSeries:
    kind = _req(cfg, "kind")
    if kind == "toric":
        return toric.to_series(parse_divisor(_req(cfg, "divisor"), curve))
    if kind == "bundle":
        divisors = [parse_divisor(d, curve) for d in _req(cfg, "divisors")]
        return series.bundle_sum_series(toric.to_multigraded_series(divisors))
    if kind == "table":
        table = {}
        for deg, items in _req(cfg, "pieces").items():
            table[_int(deg, "degree")] = [
                (tuple(_int(c, "coordinate") for c in it["point"]), _q(it["lambda"])) for it in items
            ]
        return series.table_series(_int(_req(cfg, "ambient_dim"), "ambient_dim"), table,
                                   C=_q(cfg.get("C", "0")))
    raise InputError(f"unknown series kind {kind!r}")


# ---------------------------------------------------------------------------
# experiments


def run_slopes(cfg, rep: Report, args):
    for i, sc in enumerate(cfg.get("spaces", [])):
        name = sc.get("name", f"space{i}")
        prof = flt.slope_profile(parse_space(sc))
        for k, s in enumerate(prof.slopes, 1):
            rep.add(f"{name}.mu_{k}", s)
        rep.add(f"{name}.degree", prof.degree)
        rep.add(f"{name}.positive_degree", prof.positive_degree)
        rep.add(f"{name}.mu_min", prof.mu_min)
        rep.add(f"{name}.mu_max", prof.mu_max)
    curve = parse_curve(cfg.get("curve"))
    for i, bc in enumerate(cfg.get("bundles", [])):
        name = bc.get("name", f"bundle{i}")
        lam = {label: tuple(_q(v) for v in vals) for label, vals in _req(bc, "lambda").items()}
        B = DiagonalAdelicBundle.build(curve, _req(bc, "labels"), lam)
        hn = hn_sorted(B)
        rep.add(f"{name}.degree", total_degree(B))
        for k, s in enumerate(hn.slopes, 1):
            rep.add(f"{name}.mu_{k}", s)
        if B.rank:
            flag = [[tuple(Fraction(int(i == j)) for j in range(B.rank)) for i in idx] for _, idx in hn.flag]
            fr = flag_degree_check(B, flag)
            rep.add(f"{name}.flag_slack", fr.slack, status="ok" if fr.ok else "violation",
                    detail="flag-degree-additivity")
    for i, dc in enumerate(cfg.get("pushforwards", [])):
        from .adelic import pushforward_toric

        name = dc.get("name", f"pushforward{i}")
        n = _int(_req(dc, "n"), "n")
        hn = hn_sorted(pushforward_toric(parse_divisor(_req(dc, "divisor"), curve), n))
        for k, s in enumerate(hn.slopes, 1):
            rep.add(f"{name}.mu_{k}", s, n=n)


def run_series_invariants(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    S = parse_series(_req(cfg, "series"), curve)
    n_max = _int(_req(cfg, "n_max"), "n_max")
    tol = _q(cfg["tolerance"]) if "tolerance" in cfg else None
    inv = series.asymptotic_invariants(S, n_max, tol)
    for (n, vmax), (_, vmin) in zip(inv.mu_max_trace, inv.mu_min_trace):
        rep.add("mu_max/n", vmax, n=n)
        rep.add("mu_min/n", vmin, n=n)
    rep.add("mu_max_asy", inv.mu_max_asy, detail=f"tail n>={inv.tail_start}")
    rep.add("mu_min_inf", inv.mu_min_inf, detail=f"tail n>={inv.tail_start}")
    rep.add("mu_min_sup", inv.mu_min_sup, detail=f"tail n>={inv.tail_start}")
    rep.add("tail_oscillation_max", inv.oscillation_max,
            status="ok" if inv.converged else "violation", detail="convergence")
    rep.add("tail_oscillation_min", inv.oscillation_min,
            status="ok" if inv.converged else "violation", detail="convergence")
    if "superadditivity_n_max" in cfg:
        _superadditivity_rows(S, cfg, rep)


def _superadditivity_rows(S, cfg, rep: Report):
    r = series.check_superadditivity(
        S, _int(cfg["superadditivity_n_max"], "superadditivity_n_max"),
        _int(cfg.get("factor_count_max", 2), "factor_count_max"))
    rep.add("superadditivity_checks", r.checks)
    if r.worst_slack is not None:
        rep.add("superadditivity_worst_slack", r.worst_slack)
    for v in r.violations:
        rep.add(
            "superadditivity_violation", v.lhs if v.lhs is not None else None,
            status="violation",
            detail=f"{v.inequality}; degrees={list(v.degrees)}; monomials={[list(m) for m in v.monomials]}; "
                   f"lhs={format_rational(v.lhs) if v.lhs is not None else 'absent'}; rhs={format_rational(v.rhs)}",
        )


def run_chi_vol(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    S = parse_series(_req(cfg, "series"), curve)
    d = _int(_req(cfg, "d"), "d")
    if "n_list" in cfg:
        ns = [_int(n, "n") for n in cfg["n_list"]]
    else:
        ns = list(range(1, _int(_req(cfg, "n_max"), "n_max") + 1))
    for row in series.chi_volume_sequence(S, d, ns):
        rep.add("chi_est", row.chi_est, n=row.n)
        rep.add("vol_hat_est", row.vol_hat_est, n=row.n)
        rep.add("vol_est", row.vol_est, n=row.n)


def run_hs_check(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    D = parse_divisor(_req(cfg, "divisor"), curve)
    report = toric.hilbert_samuel_check(D, _int(_req(cfg, "n_max"), "n_max"), _q(cfg.get("tolerance", "0")))
    rep.add("oracle", report.oracle)
    for row, gap in zip(report.estimates, report.gaps):
        rep.add("chi_est", row.chi_est, n=row.n)
        rep.add("gap", gap, n=row.n)
    rep.add("max_gap_tail", report.max_gap_tail, detail=f"tail n>={report.tail_start}")
    rep.add("final_gap", report.gaps[-1], n=report.estimates[-1].n,
            status="ok" if report.verdict else "violation",
            detail=f"hilbert-samuel; tolerance={format_rational(report.tolerance)}")


def run_cone_scan(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    divisors = [parse_divisor(d, curve) for d in _req(cfg, "divisors")]
    grid = [tuple(_q(w) for w in a) for a in _req(cfg, "grid")]
    n_est = _int(cfg.get("n_est", 0), "n_est")
    rows = toric.cone_scan(divisors, grid, n_est, jobs=args.jobs)
    lam = _q(cfg["lambda_bound"]) if "lambda_bound" in cfg else None
    for row in rows:
        tag = "a=(" + ",".join(format_rational(w) for w in row.weights) + ")"
        rep.add("vol", row.vol, detail=tag)
        rep.add("vol_chi_oracle", row.oracle, detail=tag)
        if row.flagged:
            rep.add("ratio", None, status="flagged", detail=tag + "; vol = 0")
        else:
            rep.add("ratio", row.ratio, detail=tag)
        if row.chi_est is not None:
            rep.add("chi_est", row.chi_est, n=row.n, detail=tag)
        if lam is not None and any(row.weights):
            try:
                v = toric.vol_I_extension(divisors, row.weights, lam)
            except ContractError as exc:
                rep.add("vol_I", None, status="violation", detail=f"{tag}; {exc}")
            else:
                rep.add("vol_I", v, status="ok" if v == row.oracle else "violation",
                        detail=tag + "; continuity-extension")


def run_certificate(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    S = parse_series(_req(cfg, "series"), curve)
    cert = series.slope_certificate(S, _int(_req(cfg, "N"), "N"), _int(_req(cfg, "n_check"), "n_check"),
                                    offset=_q(cfg.get("offset", "0")))
    rep.add("S", cert.S)
    rep.add("T", cert.T)
    rep.add("generator_degree", cert.generator_degree)
    rep.add("verified_up_to", cert.verified_up_to,
            status="ok" if cert.valid else "violation", detail="slope-certificate")
    for n, mu, bound in cert.failures:
        rep.add("certificate_failure", mu, n=n, status="violation",
                detail=f"mu_min={format_rational(mu)} < S*n+T={format_rational(bound)}")


def run_fekete(cfg, rep: Report, args):
    curve = parse_curve(cfg.get("curve"))
    S = parse_series(_req(cfg, "series"), curve)
    n = _int(_req(cfg, "n"), "n")
    sec = _req(cfg, "section")
    if isinstance(sec, dict):
        s = {tuple(_int(c, "coordinate") for c in t["point"]): _q(t["coefficient"]) for t in _req(sec, "terms")}
    else:
        s = tuple(_int(c, "coordinate") for c in sec)
    res = series.fekete_lambda(S, n, s, _int(cfg.get("m_max", 16), "m_max"))
    for m, (low, ratio) in enumerate(zip(res.lower_bounds, res.ratios), 1):
        rep.add("ratio", ratio, n=m, detail="lambda(s^m)/m")
        rep.add("lower_bound", low, n=m)
    rep.add("estimate", res.estimate)
    rep.add("upper_info", res.upper_info)
    lam = series.section_lambda(S, n, s)
    ok = S.C != 0 or res.estimate >= lam
    rep.add("lambda", lam, status="ok" if ok else "violation", detail="asymptotic norm dominates the norm")


def run_check_axioms(cfg, rep: Report, args):
    trials = _int(cfg.get("trials", 100), "trials")
    dim_max = _int(cfg.get("dim_max", 6), "dim_max")
    seed = args.seed if args.seed is not None else _int(cfg.get("seed", 0), "seed")
    rep.add("seed", seed)
    outcomes = axioms.run_axioms(seed, trials, dim_max)
    for name in axioms.AXIOMS:
        mine = [o for o in outcomes if o.axiom == name]
        bad = [o for o in mine if not o.ok]
        rep.add(f"{name}.passed", len(mine) - len(bad), status="violation" if bad else "ok",
                detail=f"of {len(mine)}")
        for o in bad:
            rep.add(name, None, n=o.trial, status="violation", detail=o.detail)


RUNNERS = {
    "slopes": run_slopes,
    "series-invariants": run_series_invariants,
    "chi-vol": run_chi_vol,
    "hs-check": run_hs_check,
    "cone-scan": run_cone_scan,
    "certificate": run_certificate,
    "fekete": run_fekete,
    "check-axioms": run_check_axioms,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slope-lab", description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    return parser


def run(kind: str, config_path: str, out_path: str, seed: int | None = None, jobs: int = 1) -> int:
    args = argparse.Namespace(kind=kind, config=config_path, out=out_path, seed=seed, jobs=max(1, jobs))
    rep = Report(kind)
    try:
        with open(config_path, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        if cfg.get("kind", kind) != kind:
            raise InputError(f"config is for {cfg['kind']!r}, not {kind!r}")
        RUNNERS[kind](cfg, rep, args)
    except (InputError, DomainError, KeyError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"slope-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractError as exc:
        rep.add("contract", None, status="violation", detail=str(exc))
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.render())
    except OSError as exc:
        print(f"slope-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_FAIL if rep.failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.kind, args.config, args.out, args.seed, args.jobs)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: every check as a subcommand, one JSON object per line."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import hypergeom as hg
from . import pencil, periods, threefold, toric
from .exactcore import parse_complex, parse_exact

PREC_ENV = "JKMIRROR_PREC"
SUBCOMMANDS = (
    "ifun", "identity", "ode", "bcm", "period", "roots", "delta-check", "subst-check",
    "fiber-check", "lines-check", "conic-check", "count", "mmp", "relations-check", "all",
)


class UsageError(ValueError):
    pass


@dataclass
class CommandRequest:
    subcommand: str
    parameters: dict = field(default_factory=dict)


@dataclass
class ReportLine:
    command: str
    params: dict
    status: str  # ok | fail | error | skipped
    data: dict
    elapsed_ms: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "params": self.params, "status": self.status,
             "data": self.data, "elapsed_ms": self.elapsed_ms},
            sort_keys=False,
        )


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, mpmath.mpc):
        return [mpmath.nstr(x.real, 30), mpmath.nstr(x.imag, 30)]
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 30)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=repr) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    return repr(x)


def default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return 256
    try:
        val = int(raw)
    except ValueError as exc:
        raise UsageError(f"{PREC_ENV} must be an integer") from exc
    if val < 64:
        raise UsageError(f"{PREC_ENV} must be >= 64")
    return val


def _parse_complex(text: str):
    try:
        return parse_complex(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc


def _alpha_mp(text: str, prec: int):
    re, im = _parse_complex(text)
    with mpmath.workprec(prec):
        return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator, mpmath.mpf(im.numerator) / im.denominator)


def _alpha_exact(text: str) -> Fraction:
    re, im = _parse_complex(text)
    if im != 0:
        raise UsageError("an exact (real rational) alpha is required here")
    return re


# ---------------------------------------------------------------------------
# individual checks; each yields (name, ok, data)


def check_ifun(o):
    h = hg.jk_hypersurface(o.k)
    cs = hg.ifun_coefficients(h, o.jmax)
    direct = [hg.ifun_coefficient(h, j) for j in range(o.jmax + 1)]
    ok = cs == direct and all(c.denominator == 1 for c in cs)
    yield "ifun", ok, {"coefficients": [str(c) for c in cs], "integral": all(c.denominator == 1 for c in cs)}


def check_identity(o):
    for j in range(o.jmax + 1):
        lhs = hg.expansion_coefficient(o.k, j)
        rhs = hg.ifun_coefficient(hg.jk_hypersurface(o.k), j)
        yield "coefficient_identity", lhs == rhs, {"j": j, "value": str(rhs)}


def check_ode(o):
    h = hg.jk_hypersurface(o.k)
    op = hg.build_operator(h)
    yield "operator_order", op.order == 6 * o.k + 2, {
        "order": op.order, "expected": 6 * o.k + 2,
        "reduced_p1": [str(x) for x in op.reduced_p1.elements()],
    }
    bad = hg.first_recurrence_failure(h, o.jmax)
    yield "recurrence", bad is None, {"jmax": o.jmax, "first_failure": bad}


def check_bcm(o):
    d = hg.bcm_data(o.k)
    yield "bcm_data", len(d.v) == len(d.w) == 6 * o.k + 2 and sum(d.p) == sum(d.q), {
        "p": list(d.p), "q": list(d.q), "M": str(d.M), "v": [str(x) for x in d.v], "w": [str(x) for x in d.w],
    }
    yield "multiset_identity", hg.multiset_identity_check(o.k), {}
    prod = hg.m_alpha_product(o.k)
    yield "m_alpha_product", prod == 1, {"value": str(prod)}
    crit = hg.alpha_crit(o.k)
    sv = hg.singular_value(hg.jk_hypersurface(o.k))
    yield "singular_value", sv == crit, {"prod_formula": str(sv), "closed_form": str(crit)}
    yield "bcm_series", hg.bcm_series_check(o.k, min(o.jmax, 30)), {"jmax": min(o.jmax, 30)}


def check_period(o):
    alpha = _alpha_mp(o.alpha, o.prec)
    res = periods.period_series_check(o.k, alpha, o.prec, o.tol)
    yield "period_vs_series", res.passed, {
        "agreement": res.agreement, "error_estimate": res.period.error_estimate,
        "samples": res.period.sample_count, "period": res.period.value,
        "series": res.series_value, "series_terms": res.series_terms_used,
        "branch_margin": res.period.branch_margin,
    }


def check_roots(o):
    alpha = _alpha_mp(o.alpha, o.prec)
    bd = pencil.branch_points(o.k, alpha, o.prec)
    with mpmath.workprec(o.prec):
        outer = [abs(z) for z in bd.classes["outer"]]
        mid_ratio = [abs(z) / bd.centers["middle"] for z in bd.classes["middle"]]
        outer_ok = len(outer) == 1 and abs(outer[0] * 64 - 1) < mpmath.mpf("0.01")
        mid_ok = bool(mid_ratio) and all(mpmath.mpf(1) / 2 <= r <= 2 for r in mid_ratio)
        resid_ok = bd.residual_max < mpmath.mpf(2) ** (-(o.prec // 2))
    yield "root_classes", bd.sizes_ok, {"sizes": bd.class_sizes()}
    yield "outer_root", outer_ok, {"moduli": outer}
    yield "middle_roots", mid_ok, {"ratio_to_center": mid_ratio}
    yield "residuals", bool(resid_ok), {"max_residual": bd.residual_max, "scaled": bd.residual_bound,
                                         "iterations": bd.iterations}


def check_delta(o):
    rep = pencil.delta_branch_identity(o.k)
    yield "delta_identity", rep.equal, {"difference": repr(rep.difference)}
    # control: the variant must differ from delta1*delta2; the difference is reported
    yield "low_exponent_variant", not rep.variant_equal, {
        "variant_equal": rep.variant_equal,
        "variant_difference": repr(rep.variant_difference),
    }


def check_subst(o):
    rep = threefold.substitution_check(o.k)
    yield "substitution", rep.equal and repr(rep.factor) == "x*z", {
        "factor": repr(rep.factor), "difference": repr(rep.difference) if rep.difference else None,
    }


def _random_regular_t(rng, k, a, count):
    out = []
    while len(out) < count:
        t = Fraction(rng.randint(1, 400), rng.randint(1, 100)) * rng.choice((1, -1))
        if threefold.delta1(k, a, t) != 0 and threefold.delta2(k, a, t) != 0:
            out.append(t)
    return out


def check_fiber(o):
    a = _alpha_exact(o.a)
    rng = random.Random(o.seed)
    for t in [Fraction(2)] + _random_regular_t(rng, o.k, a, 9):
        g = threefold.fiber_special_points(o.k, a, "regular", t=t, precision_bits=o.prec)
        yield "regular_points", g.ok, {"t": str(t), "residuals": g.residuals,
                                       "alternate_p_residuals": g.alternate_residuals}
    g = threefold.fiber_special_points(o.k, a, "delta1_root", precision_bits=o.prec)
    yield "delta1_point", g.ok, {"t": g.t_value, "residual": g.residuals, "gradient": g.gradient_residuals}
    g = threefold.fiber_special_points(o.k, a, "delta2_root", precision_bits=o.prec)
    yield "delta2_point", g.ok, {"t": g.t_value, "residual": g.residuals, "gradient": g.gradient_residuals,
                                 "alternate_residuals": g.alternate_residuals}


def check_lines(o):
    a = _alpha_exact(o.a)
    rng = random.Random(o.seed)
    for t in [Fraction(2 * o.k - 1 if o.k > 1 else 2)] + _random_regular_t(rng, o.k, a, 9):
        rep = threefold.lines_on_fiber(o.k, a, t, o.prec)
        yield "lines", rep.ok, {"t": str(t), "max_residual": {n: max(v) for n, v in rep.residuals.items()}}
    with mpmath.workprec(o.prec):
        t0 = threefold.delta_roots(o.k, mpmath.mpf(a.numerator) / a.denominator, "delta2", o.prec)[0]
        rep = threefold.lines_on_fiber(o.k, a, t0 + mpmath.mpf(10) ** -40, o.prec)
    yield "collision_near_delta2_root", rep.collision, {"nu_gap": rep.nu_gap}


def check_conic(o):
    r = threefold.coordchange_check(o.k, o.seed)
    yield "coordinate_change", r.equal, {"status": r.result.status, "samples": r.result.samples_used,
                                         "substituted_into_w_hat": r.substituted_into_w_hat.status}
    neg = threefold.coordchange_check(o.k, o.seed, wrong_sign=True)
    yield "coordinate_change_negative_control", neg.result.status == "not_equal", {"status": neg.result.status}
    c = threefold.conic_bundle_check(o.k, o.seed)
    yield "conic_bundle", c.equal and c.x1_exponent is not None, {
        "status": c.result.status, "factor": repr(c.result.factor) if c.result.factor else None,
        "x1_exponent": c.x1_exponent, "delta1_exponent": c.delta1_exponent, "constant": c.constant,
    }
    neg = threefold.conic_bundle_check(o.k, o.seed, drop_delta1=True)
    yield "conic_bundle_negative_control", neg.result.status == "not_equal", {"status": neg.result.status}


def check_count(o):
    if o.q is None:
        raise UsageError("count needs --q")
    alpha = _alpha_exact(o.alpha)
    if o.target == "W":
        val = threefold.count_W(o.k, alpha, o.q, o.method)
        data = {"count": val, "method": o.method}
        ok = True
        if o.method == "char" and o.q <= threefold.BRUTE_MAX_Q:
            brute = threefold.count_W(o.k, alpha, o.q, "brute")
            data["brute"] = brute
            ok = brute == val
        yield "count_W", ok, data
    else:
        if o.method == "brute":
            val = pencil.count_Y_brute(o.k, alpha, o.q)
            yield "count_Y", True, {"affine_count": val, "method": "brute"}
            return
        res = pencil.charsum_Y(o.k, alpha, o.q)
        data = {"S": res.S, "affine_count": res.affine_count, "weil_ok": res.weil_ok}
        ok = res.weil_ok and res.affine_count == o.q + res.S
        if o.q <= 31:
            data["brute"] = pencil.count_Y_brute(o.k, alpha, o.q)
            ok = ok and data["brute"] == res.affine_count
        yield "charsum_Y", ok, data


def check_mmp(o):
    run = toric.mmp_thresholds(o.k)
    exp = toric.expected_thresholds(o.k)
    yield "thresholds", run.thresholds == exp, {
        "thresholds": [str(x) for x in run.thresholds], "vertex_counts": run.vertex_counts,
        "final_segment": [[str(x) for x in v] for v in run.final_segment],
    }
    rep = toric.final_fan_check(o.k)
    yield "final_fan", rep.passed, {
        "ray_labels": rep.ray_labels, "rho10": rep.rho10, "rho10_engine_label": rep.rho10_label,
        "cones": rep.cone_count, "missing": rep.missing, "unexpected": rep.unexpected,
        "vertices": rep.vertex_count, "facets": rep.facet_count,
    }


def check_relations(o):
    rep = toric.quotient_relations_check(o.k)
    yield "relations", rep.passed, {
        "relation": rep.relation_ok, "half_sum": [str(x) for x in rep.half_sum],
        "half_sum_in_N0": rep.half_sum_in_N0, "half_sum_outside_span": rep.half_sum_outside_N00,
        "pairing_identity": rep.pairing_is_identity, "substitution_exponents": rep.substitution_exponents,
    }


CHECKS = {
    "ifun": check_ifun, "identity": check_identity, "ode": check_ode, "bcm": check_bcm,
    "period": check_period, "roots": check_roots, "delta-check": check_delta,
    "subst-check": check_subst, "fiber-check": check_fiber, "lines-check": check_lines,
    "conic-check": check_conic, "count": check_count, "mmp": check_mmp,
    "relations-check": check_relations,
}


# ---------------------------------------------------------------------------


def _params(o) -> dict:
    keys = ("k", "jmax", "alpha", "a", "q", "prec", "tol", "seed", "method", "target")
    return {key: getattr(o, key) for key in keys if getattr(o, key, None) is not None}


def execute(name: str, o, emit) -> list[str]:
    """Run one subcommand's checks, emitting a report line per check."""
    statuses = []
    params = _params(o)
    start = time.perf_counter()
    try:
        for check, ok, data in CHECKS[name](o):
            now = time.perf_counter()
            line = ReportLine(f"{name}:{check}", params, "ok" if ok else "fail", jsonable(data),
                              int((now - start) * 1000))
            start = now
            emit(line)
            statuses.append(line.status)
    except UsageError:
        raise
    except Exception as exc:  # runtime faults become report lines, not tracebacks
        line = ReportLine(name, params, "error", {"error": f"{type(exc).__name__}: {exc}"},
                          int((time.perf_counter() - start) * 1000))
        emit(line)
        statuses.append("error")
    return statuses


def _ns(base, **kw):
    d = dict(vars(base))
    d.update(kw)
    return argparse.Namespace(**d)


def all_requests(o, kmax: int) -> list[tuple[str, argparse.Namespace]]:
    """The acceptance matrix in a fixed order."""
    reqs = []
    for k in range(1, kmax + 1):
        reqs.append(("identity", _ns(o, k=k, jmax=40)))
        reqs.append(("ode", _ns(o, k=k, jmax=60)))
        reqs.append(("bcm", _ns(o, k=k, jmax=30)))
        reqs.append(("delta-check", _ns(o, k=k)))
        reqs.append(("subst-check", _ns(o, k=k)))
        reqs.append(("mmp", _ns(o, k=k)))
        reqs.append(("relations-check", _ns(o, k=k)))
        if k <= 2:
            for alpha in LITERAL_ALPHAS:
                reqs.append(("period", _ns(o, k=k, alpha=alpha)))
            crit = hg.alpha_crit(k)
            reqs.append(("period", _ns(o, k=k, alpha=str(crit / 1000))))
            reqs.append(("roots", _ns(o, k=k, alpha="1e-6")))
            reqs.append(("roots", _ns(o, k=k, alpha=str(crit / 1000))))
            reqs.append(("conic-check", _ns(o, k=k, seed=7)))
            for q in (3, 5, 7):
                reqs.append(("count", _ns(o, k=k, q=q, alpha="1", target="W", method="char")))
        if k == 1:
            reqs.append(("fiber-check", _ns(o, k=1, a="1")))
            reqs.append(("lines-check", _ns(o, k=1, a="1")))
            reqs.append(("count", _ns(o, k=1, q=101, alpha="1", target="Y", method="char")))
    return reqs


def _rotated(modulus: str, digits: int = 60) -> str:
    """modulus * exp(i pi/5) as an "re,im" decimal string."""
    with mpmath.workprec(4 * digits):
        z = mpmath.mpf(modulus) * mpmath.expjpi(mpmath.mpf(1) / 5)
        return f"{mpmath.nstr(z.real, digits)},{mpmath.nstr(z.imag, digits)}"


LITERAL_ALPHAS = ("1e-3", _rotated("1e-3"))


def run_all(o, kmax: int, budget_seconds: float | None, emit) -> list[str]:
    if kmax < 1:
        raise UsageError("kmax must be >= 1")
    deadline = None if budget_seconds is None else time.perf_counter() + budget_seconds
    statuses = []
    for name, req in all_requests(o, kmax):
        if deadline is not None and time.perf_counter() > deadline:
            emit(ReportLine(name, _params(req), "skipped", {"reason": "budget exceeded"}))
            statuses.append("skipped")
            continue
        statuses.extend(execute(name, req, emit))
    return statuses


def exit_code(statuses) -> int:
    if "fail" in statuses or "error" in statuses:
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=1)
    common.add_argument("--jmax", type=int, default=40)
    common.add_argument("--alpha", default="1e-3")
    common.add_argument("--a", default="1")
    common.add_argument("--q", type=int)
    common.add_argument("--prec", type=int, default=None)
    common.add_argument("--tol", default=periods.DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    common.add_argument("--method", choices=("char", "brute"), default="char")
    common.add_argument("--target", choices=("W", "Y"), default="W")
    common.add_argument("--budget-seconds", type=float, default=None)
    parser = argparse.ArgumentParser(prog="jkmirror", description="Verification workbench checks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _table_emitter(out):
    def emit(line: ReportLine):
        summary = json.dumps(line.data)
        if len(summary) > 90:
            summary = summary[:87] + "..."
        out.write(f"{line.status:8s} {line.command:42s} {summary}\n")
    return emit


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        o = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    emit = _table_emitter(out) if o.format == "table" else (lambda line: out.write(line.to_json() + "\n"))
    try:
        if o.prec is None:
            o.prec = default_prec()
        if o.prec < 64:
            raise UsageError("--prec must be >= 64")
        if o.k < 1 and o.subcommand != "all":
            raise UsageError("--k must be >= 1")
        parse_exact(o.tol)
        if o.subcommand == "all":
            statuses = run_all(o, o.k, o.budget_seconds, emit)
        else:
            statuses = execute(o.subcommand, o, emit)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        emit(ReportLine(o.subcommand, _params(o), "error", {"error": f"usage: {exc}"}))
        return 2
    return exit_code(statuses)


if __name__ == "__main__":
    sys.exit(main())

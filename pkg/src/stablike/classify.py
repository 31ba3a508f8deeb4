"""Verdict assembly on top of the drift-condition tail scans.

A chain is scanned against every admissible drift display and the
verdict follows the evidence hierarchy

  Ergodic > Recurrent > Transient > benchmark fallback > Inconclusive

where a display "fires" only when its margin is strictly positive and
at least twice the estimated scan error. The displays are sufficient
conditions: a non-firing scan proves nothing, so near-boundary cases
come back Inconclusive rather than guessed. If displays fire in both
directions on the same run the result is Inconclusive with both
margins listed, since that can only mean the scan horizon lied.

Beta ladders (ledger defaults): recurrence and ergodicity scans use
beta in {min(1, inf alpha - 0.05), 0.01}, transience scans use
{0.5, 0.01}; the best (largest-margin) beta per condition is kept.

Extra evidence channels:
  - null-chain check: reversed-inequality versions of the log/power
    recurrence displays, thresholds taken at the largest limiting
    alpha; positive evidence turns a Recurrent verdict into
    NullCandidate (never overrides Transient).
  - small-index decay: for chains with sup alpha < 1, the pointwise
    rate alpha(x)|x|^(alpha(x)-1)/c(x) decaying monotonically through
    1e-6 is transience evidence on its own.
  - two-valued benchmark: for a symmetric-jump chain whose index takes
    one value per half-line and no display fired, the known exact
    dichotomy in the index sum (recurrent iff sum >= 2) decides, with
    an exemption band around the critical sum and an explicit caveat.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import ChainSpec, ProfileFn, alpha_at, c_at
from .drift import (
    DEFAULT_DELTA_GRID,
    LT_CONDITIONS,
    TailScanReport,
    default_x_grid,
    tail_scan,
)
from .errors import DomainError
from .stable import DensityTable
from .thresholds import r1, r2

RECURRENT_CONDITIONS = ("log_rec", "pow_rec", "mom_rec")
TRANSIENT_CONDITIONS = ("bnd_trans", "mom_trans", "idx_decay")
ERGODIC_CONDITIONS = ("log_erg", "pow_erg", "mom_erg", "mom_erg_b")

VERDICTS = ("Recurrent", "Transient", "Ergodic", "NullCandidate", "Inconclusive")

_DECAY_TOL = 1e-6


@dataclass(frozen=True)
class ScanSettings:
    """Grid and resource knobs shared by all classification scans.

    None fields fall back to the drift-layer defaults. decay_horizon
    only affects the small-index decay shortcut, which is pointwise
    (no quadrature) and therefore can afford a much longer horizon
    than the integral scans.
    """

    x_grid: tuple | None = None
    delta_grid: tuple | None = None
    d_grid: tuple | None = None
    betas: tuple | None = None
    threads: int = 1
    decay_horizon: float = 1e16


@dataclass(frozen=True)
class Classification:
    verdict: str
    conditions_used: tuple
    margins: dict = field(default_factory=dict)
    caveats: tuple = ()
    beta_used: float | None = None
    reports: tuple = ()

    def to_json_dict(self) -> dict:
        def fin(v):
            # strict-JSON safe: -inf margins (diverging trends) become text
            return v if v is None or math.isfinite(v) else repr(v)

        return {
            "verdict": self.verdict,
            "conditions_used": list(self.conditions_used),
            "margins": {k: fin(float(v)) for k, v in self.margins.items()},
            "caveats": list(self.caveats),
            "beta_used": self.beta_used,
            "reports": [
                {
                    "condition": r.condition_id,
                    "beta": r.beta,
                    "tail_sup": fin(r.tail_sup_estimate),
                    "tail_inf": fin(r.tail_inf_estimate),
                    "threshold": r.threshold,
                    "margin": fin(r.margin),
                    "scan_error": r.scan_error,
                    "trend": r.trend_flag,
                }
                for r in self.reports
            ],
        }

    def summary_line(self) -> str:
        if not self.conditions_used:
            tail = self.caveats[0] if self.caveats else "no display fired"
            return f"{self.verdict}: {tail}"
        conds = ",".join(self.conditions_used)
        parts = [f"{self.verdict} via {conds}"]
        if self.margins:
            parts.append(f"margin {max(self.margins.values()):.4g}")
        if self.beta_used is not None:
            parts.append(f"beta {self.beta_used:g}")
        return " | ".join(parts)


@dataclass(frozen=True)
class Evidence:
    """Boolean evidence with the numbers that produced it."""

    holds: bool
    detail: str
    margins: dict = field(default_factory=dict)
    caveats: tuple = ()
    reports: tuple = ()


def _require_builtin_alpha(spec: ChainSpec):
    if spec.alpha_profile.kind == "custom":
        raise DomainError(
            "classification needs an alpha profile with an enumerable value set"
        )


def _beta_ladders(spec: ChainSpec, settings: ScanSettings) -> tuple[tuple, tuple]:
    if settings.betas is not None:
        ladder = tuple(float(b) for b in settings.betas)
        if not ladder or any(not 0.0 < b <= 1.0 for b in ladder):
            raise DomainError("betas must be a non-empty subset of (0, 1]")
        return ladder, ladder
    a_inf = min(spec.alpha_profile.value_set())
    rec_main = max(0.01, min(1.0, a_inf - 0.05))
    rec = tuple(dict.fromkeys((rec_main, 0.01)))
    return rec, (0.5, 0.01)


def _fired(report: TailScanReport) -> bool:
    return report.margin > 0.0 and report.margin >= 2.0 * report.scan_error


def _run_scans(spec: ChainSpec, settings: ScanSettings, jobs: list) -> list:
    x_grid = settings.x_grid if settings.x_grid is not None else default_x_grid()
    delta_grid = (
        settings.delta_grid if settings.delta_grid is not None else DEFAULT_DELTA_GRID
    )
    # warm the per-alpha density tables before fanning out, so worker
    # threads never build the same table twice
    for a in spec.alpha_profile.value_set():
        DensityTable.for_alpha(a)

    def run(job):
        cid, beta, weight = job
        return tail_scan(
            spec,
            x_grid=x_grid,
            delta_grid=delta_grid,
            d_grid=settings.d_grid,
            condition_id=cid,
            beta=beta,
            d_weight=weight,
        )

    if settings.threads > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]


def _best_per_condition(reports) -> dict:
    best: dict = {}
    for rep in reports:
        cur = best.get(rep.condition_id)
        if cur is None or rep.margin > cur.margin:
            best[rep.condition_id] = rep
    return best


def _outer_levels_from_points(report: TailScanReport):
    """Rebuild per-delta outer-half aggregates at the smallest d.

    The scan report keeps every point, so the minimizing (inf-side)
    trajectory can be reconstructed for the reversed-inequality null
    check without re-running quadrature.
    """
    pts = report.points
    d_min = min(p.d for p in pts)
    mags = sorted({abs(p.x) for p in pts})
    cut = float(np.median(mags))
    deltas = sorted({p.delta for p in pts}, reverse=True)
    infs, worst_q = [], 0.0
    for delta in deltas:
        level = [
            p for p in pts if p.d == d_min and p.delta == delta and abs(p.x) >= cut
        ]
        infs.append(min(p.normalized_lhs for p in level))
        if delta == deltas[-1]:
            worst_q = max(p.quadrature_error for p in level)
    gap = 0.0
    if len(deltas) >= 2:
        v1, v2 = infs[-2], infs[-1]
        d_prev, d_last = deltas[-2], deltas[-1]
        extrap = v2 + (v2 - v1) * d_last / (d_prev - d_last)
        gap = abs(v2 - extrap)
    return infs[-1], gap, worst_q


def _null_evidence(spec: ChainSpec, base_reports: dict) -> Evidence:
    """Reversed-inequality check of the recurrence displays.

    Evidence that the chain, if recurrent, has no finite invariant
    measure: the same log/power scans must stay ABOVE the threshold
    taken at the largest limiting alpha.
    """
    a_sup = max(spec.alpha_profile.limit_values())
    margins: dict = {}
    caveats: list = []
    holds = False
    for cid in ("log_rec", "pow_rec"):
        rep = base_reports.get(cid)
        if rep is None:
            continue
        if cid == "log_rec":
            thr, thr_err = r1(a_sup), 0.0
        else:
            tv = r2(a_sup, rep.beta)
            thr, thr_err = tv.value, tv.est_abs_error
        tail_inf, gap, worst_q = _outer_levels_from_points(rep)
        margin = tail_inf - thr
        err = worst_q + gap + thr_err
        margins[cid + "_null"] = margin
        if margin > 0.0 and margin >= 2.0 * err:
            holds = True
    if (
        spec.alpha_profile.kind == "constant"
        and spec.family.gamma_profile.kind == "constant"
        and spec.family.delta_profile.kind == "constant"
    ):
        caveats.append(
            "independent-increment chain: no finite invariant measure exists "
            "(structural fact about this family, not a scan result)"
        )
    detail = (
        "reversed recurrence displays exceed the upper-index threshold"
        if holds
        else "reversed recurrence displays stay below the upper-index threshold"
    )
    return Evidence(holds, detail, margins, tuple(caveats))


def classify_null(spec: ChainSpec, settings: ScanSettings | None = None) -> Evidence:
    """Null-chain evidence: recurrent mass spreads out (no invariant law).

    Runs the log/power recurrence scans and checks the reversed
    inequalities against thresholds at the largest limiting alpha.
    Positive evidence only annotates a Recurrent verdict; it never
    produces one.
    """
    settings = settings or ScanSettings()
    _require_builtin_alpha(spec)
    rec_betas, _ = _beta_ladders(spec, settings)
    jobs = [("log_rec", None, None)]
    jobs += [("pow_rec", b, None) for b in rec_betas]
    reports = _run_scans(spec, settings, jobs)
    ev = _null_evidence(spec, _best_per_condition(reports))
    return replace(ev, reports=tuple(reports))


def classify_transient_smallalpha(
    spec: ChainSpec, settings: ScanSettings | None = None
) -> Evidence:
    """Transience shortcut for uniformly small index.

    When sup alpha < 1 the pointwise rate alpha(x)|x|^(alpha(x)-1)/c(x)
    decaying to zero is itself transience evidence. The decay check is
    discretized as: per-decade maxima of the rate are non-increasing on
    each half-line and the final decade sits below 1e-6. Pointwise
    evaluation is cheap, so the horizon extends far beyond the integral
    scans' grid.
    """
    settings = settings or ScanSettings()
    _require_builtin_alpha(spec)
    a_sup = max(spec.alpha_profile.value_set())
    if not a_sup < 1.0:
        raise DomainError(
            f"small-index transience shortcut needs sup alpha < 1, got {a_sup}"
        )
    lo, hi = 1e2, float(settings.decay_horizon)
    if not hi > 10.0 * lo:
        raise DomainError("decay_horizon must exceed 1e3")
    n = max(30, int(8 * math.log10(hi / lo)))
    mags = np.geomspace(lo, hi, n)
    holds = True
    last_max = 0.0
    for side in (1.0, -1.0):
        xs = side * mags
        rate = np.array(
            [alpha_at(spec, x) * abs(x) ** (alpha_at(spec, x) - 1.0) / c_at(spec, x)
             for x in xs]
        )
        decade = np.floor(np.log10(mags)).astype(int)
        maxima = [rate[decade == dec].max() for dec in np.unique(decade)]
        if any(m2 > m1 * (1.0 + 1e-12) for m1, m2 in zip(maxima, maxima[1:])):
            holds = False
        if maxima[-1] >= _DECAY_TOL:
            holds = False
        last_max = max(last_max, float(maxima[-1]))
    margins = {"idx_decay": _DECAY_TOL - last_max}
    detail = (
        f"jump rate decays monotonically to {last_max:.3g} at |x|={hi:.1e}"
        if holds
        else f"jump rate does not decay through {_DECAY_TOL:g} "
             f"(final-decade max {last_max:.3g})"
    )
    return Evidence(holds, detail, margins)


def f_ergodic_check(
    spec: ChainSpec,
    g_profile: ProfileFn,
    settings: ScanSettings | None = None,
) -> Evidence:
    """Weighted-ergodicity evidence for moments up to a weight function.

    Runs the ergodicity displays with the d-term scaled by g(x) (log
    kernel) or g(x)|x|^(-beta) (power kernel). Positive evidence
    certifies convergence in the g-weighted norm, hence finiteness of
    pi(f) for every f with 1 <= f <= g. g must be >= 1 everywhere; with
    g identically 1 the scans reduce exactly to the unweighted
    ergodicity displays.
    """
    settings = settings or ScanSettings()
    _require_builtin_alpha(spec)
    if g_profile.kind == "custom":
        xs = settings.x_grid if settings.x_grid is not None else default_x_grid()
        if min(float(g_profile(x)) for x in xs) < 1.0:
            raise DomainError("weight profile must satisfy g(x) >= 1")
        caveat_g = ("weight bound g >= 1 checked pointwise on the scan grid only",)
    else:
        if min(g_profile.value_set()) < 1.0:
            raise DomainError("weight profile must satisfy g(x) >= 1")
        caveat_g = ()
    rec_betas, _ = _beta_ladders(spec, settings)
    a_inf = min(spec.alpha_profile.value_set())
    betas = tuple(b for b in rec_betas if b < a_inf) or (
        max(0.005, 0.5 * a_inf),
    )
    jobs = [("log_erg", None, g_profile)]
    jobs += [("pow_erg", b, g_profile) for b in betas]
    reports = [
        replace(rep, condition_id=rep.condition_id + "_w")
        for rep in _run_scans(spec, settings, jobs)
    ]
    best = _best_per_condition(reports)
    fired = {cid: rep for cid, rep in best.items() if _fired(rep)}
    margins = {cid: rep.margin for cid, rep in best.items()}
    if g_profile.kind == "custom":
        weight_class = "custom weight (pointwise-checked)"
    else:
        vals = ", ".join(f"{v:g}" for v in g_profile.value_set())
        weight_class = f"{g_profile.kind} weight with values {{{vals}}}"
    if fired:
        detail = f"weighted drift certified for {weight_class}"
        caveats = caveat_g
    else:
        detail = f"no weighted display certified for {weight_class}"
        caveats = caveat_g + (
            "weight grows faster than the certified drift margin",
        )
    return Evidence(bool(fired), detail, margins, caveats, tuple(reports))


def _two_valued_fallback(spec: ChainSpec, caveats: list) -> Classification | None:
    """Exact index-sum dichotomy for symmetric two-valued chains."""
    prof = spec.alpha_profile
    if prof.kind != "two_valued":
        return None
    dprof = spec.family.delta_profile
    if dprof.kind == "custom" or set(dprof.value_set()) != {0.0}:
        return None
    total = sum(prof.values)
    if abs(total - 2.0) < 0.1:
        caveats.append(
            "index sum within 0.1 of the critical value 2: benchmark dichotomy "
            "withheld and no display fired"
        )
        return None
    verdict = "Recurrent" if total > 2.0 else "Transient"
    caveats.append(
        "verdict from the exact two-valued index-sum dichotomy "
        "(symmetric jumps); drift displays were individually inconclusive"
    )
    return Classification(
        verdict,
        ("two_valued_benchmark",),
        {"two_valued_benchmark": abs(total - 2.0)},
        tuple(caveats),
        None,
        (),
    )


def classify(spec: ChainSpec, settings: ScanSettings | None = None) -> Classification:
    """Scan all admissible drift displays and assemble a verdict.

    Returns Ergodic/Recurrent/Transient only on strictly positive
    margins at least twice the scan error; Ergodic additionally
    requires a recurrence display to fire (a positive chain must be
    recurrent). Conflicting directions or near-boundary margins come
    back Inconclusive with the numbers attached.
    """
    settings = settings or ScanSettings()
    _require_builtin_alpha(spec)
    caveats: list = []
    if spec.unchecked:
        caveats.append("model envelope assumptions assumed, not certified")
    rec_betas, trans_betas = _beta_ladders(spec, settings)
    # first-moment shortcuts need the scale floor and index ceiling that
    # only enumerable profiles guarantee
    moments_ok = not spec.unchecked
    if not moments_ok:
        caveats.append(
            "first-moment displays skipped: jump-tail uniformity not "
            "certifiable for custom profiles"
        )
    jobs = [("log_rec", None, None), ("log_erg", None, None)]
    jobs += [("pow_rec", b, None) for b in rec_betas]
    jobs += [("pow_erg", b, None) for b in rec_betas]
    jobs += [("bnd_trans", b, None) for b in trans_betas]
    if moments_ok:
        jobs += [
            ("mom_rec", None, None),
            ("mom_trans", None, None),
            ("mom_erg", None, None),
        ]
        jobs += [("mom_erg_b", b, None) for b in rec_betas]
    reports = _run_scans(spec, settings, jobs)
    best = _best_per_condition(reports)
    fired = {cid: rep for cid, rep in best.items() if _fired(rep)}
    for rep in best.values():
        if rep.trend_flag == "diverging":
            grid_margin = (
                rep.threshold - rep.tail_sup_estimate
                if rep.condition_id in LT_CONDITIONS
                else rep.tail_inf_estimate - rep.threshold
            )
            if grid_margin > 0.0:
                caveats.append(
                    f"{rep.condition_id}: display holds on the grid but the "
                    "per-magnitude values keep moving toward the threshold; "
                    "not certified"
                )
        elif rep.trend_flag != "ok":
            caveats.append(
                f"{rep.condition_id}: {rep.trend_flag} truncation trend, "
                "margin error widened"
            )

    margins_fired = {cid: rep.margin for cid, rep in fired.items()}
    rec_fired = [c for c in RECURRENT_CONDITIONS if c in fired]
    erg_fired = [c for c in ERGODIC_CONDITIONS if c in fired]
    trans_fired = [c for c in TRANSIENT_CONDITIONS if c in fired]

    a_sup = max(spec.alpha_profile.value_set())
    if a_sup < 1.0 and not spec.unchecked:
        decay = classify_transient_smallalpha(spec, settings)
        if decay.holds:
            trans_fired.append("idx_decay")
            margins_fired["idx_decay"] = decay.margins["idx_decay"]

    all_reports = tuple(best.values())

    if (rec_fired or erg_fired) and trans_fired:
        used = tuple(rec_fired + erg_fired + trans_fired)
        caveats.append(
            "displays fired in both directions; scan horizon is not to be "
            "trusted for this chain"
        )
        return Classification(
            "Inconclusive",
            used,
            {c: margins_fired[c] for c in used},
            tuple(caveats),
            None,
            all_reports,
        )

    def beta_of(ids):
        with_beta = [c for c in ids if fired[c].beta is not None]
        if not with_beta:
            return None
        return fired[max(with_beta, key=lambda c: fired[c].margin)].beta

    if erg_fired:
        if not rec_fired:
            caveats.append(
                "ergodicity display fired without recurrence support; "
                "verdict withheld"
            )
            used = tuple(erg_fired)
            return Classification(
                "Inconclusive",
                used,
                {c: margins_fired[c] for c in used},
                tuple(caveats),
                beta_of(erg_fired),
                all_reports,
            )
        used = tuple(erg_fired + rec_fired)
        return Classification(
            "Ergodic",
            used,
            {c: margins_fired[c] for c in used},
            tuple(caveats),
            beta_of(erg_fired),
            all_reports,
        )

    if rec_fired:
        null_ev = _null_evidence(spec, best)
        caveats.extend(null_ev.caveats)
        verdict = "Recurrent"
        margins = {c: margins_fired[c] for c in rec_fired}
        if null_ev.holds:
            verdict = "NullCandidate"
            caveats.append(
                "recurrent with evidence against a finite invariant measure"
            )
            margins.update(
                {k: v for k, v in null_ev.margins.items() if v > 0.0}
            )
        return Classification(
            verdict,
            tuple(rec_fired),
            margins,
            tuple(caveats),
            beta_of(rec_fired),
            all_reports,
        )

    if trans_fired:
        used = tuple(trans_fired)
        scan_ids = [c for c in trans_fired if c in fired]
        return Classification(
            "Transient",
            used,
            {c: margins_fired[c] for c in used},
            tuple(caveats),
            beta_of(scan_ids),
            all_reports,
        )

    fallback = _two_valued_fallback(spec, caveats)
    if fallback is not None:
        return replace(fallback, reports=all_reports)

    near = max(best.values(), key=lambda r: r.margin, default=None)
    if near is not None:
        caveats.append(
            f"no display fired; closest was {near.condition_id} with margin "
            f"{near.margin:.4g} against scan error {near.scan_error:.4g}"
        )
    return Classification(
        "Inconclusive", (), {}, tuple(caveats), None, all_reports
    )

"""Per-instance reports and the seeded batch harness behind ``cpnilp analyze`` and ``cpnilp verify``."""
from __future__ import annotations

import time
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import jsonio
from .cpmap import (
    KrausMap,
    adjoint_span,
    annihilated_vectors,
    conjugate,
    index,
    kraus_products,
    normalized,
    power_apply,
    reduce_kraus,
    superoperator_distance,
    trace_duality_gap,
    unit_kernel,
    unit_range,
)
from .ensembles import make_contractive, random_cp_map, random_nilpotent
from .errors import IllConditioned
from .majorization import (
    check_theorem_3_1,
    compress,
    cone_membership,
    convex_weights,
    extreme_points,
    random_invariant_instance,
    sample_cone,
    split,
    verify_extreme,
)
from .nilpotency import (
    check_basic_inequalities,
    check_block_triangular,
    check_l_lower_bound,
    check_theorem_2_7,
    commuting_flags_report,
    cp_type,
    flag,
    linear_nilpotent_type,
    nilpotency_order,
)
from .numerics import DEFAULT_TOL, Subspace, Tolerance, common_kernel, subspace_distance
from .roots import build_root, check_power_formula, compress_to_nilpotent, diagnose_root

PASS, FAIL, NA = "pass", "fail", "not_applicable"

VERDICT_KEYS = (
    "prop_2_1", "trace_duality", "prop_2_2", "thm_2_4", "thm_2_7", "cor_2_5",
    "prop_2_6", "thm_3_1", "thm_4_3", "l_lower_bound", "block_triangular",
    "commuting_flags", "kraus_reduction",
)

# products of more factors than this are not enumerated
MAX_PRODUCTS = 4096


def _v(ok: bool) -> str:
    return PASS if ok else FAIL


def _type_or_empty(alpha: Optional[KrausMap], tol: Tolerance) -> tuple:
    return cp_type(alpha, tol) if alpha is not None else ()


def invariant_verdict(alpha: KrausMap, M: Subspace, tol: Tolerance) -> bool:
    """Prefix majorization of the type of α by the types of its two compressions."""
    beta, gamma = compress(split(alpha, M, tol))
    return check_theorem_3_1(cp_type(alpha, tol), _type_or_empty(beta, tol), _type_or_empty(gamma, tol))


def flag_invariant_subspaces(alpha: KrausMap, tol: Tolerance) -> list:
    """M_k = H_(k+1) ⊕ ... ⊕ H_p for k = 1..p-1; the complement H_1 ⊕ ... ⊕ H_k is invariant under every L_i."""
    parts = flag(alpha, tol).subspaces
    out = []
    for k in range(1, len(parts)):
        out.append(Subspace(np.hstack([S.basis for S in parts[k:]])))
    return out


def _products_verdict(alpha: KrausMap, order: Optional[int], tol: Tolerance) -> str:
    """Kraus words of length k all vanish exactly when α^k(I) does, for k = p-1 and p (or n)."""
    unit, _ = normalized(alpha)
    lengths = [order - 1, order] if order is not None else [alpha.dim]
    lengths = [k for k in lengths if k >= 1]
    if not lengths or alpha.d ** max(lengths) > MAX_PRODUCTS:
        return NA
    for k in lengths:
        words = max(float(np.linalg.norm(P)) for _, P in kraus_products(unit, k))
        unit_k = float(np.linalg.norm(power_apply(unit, k, np.eye(alpha.dim))))
        if (words < tol.atol) != (unit_k < tol.atol):
            return FAIL
    return PASS


def _root_verdict(alpha: KrausMap, tol: Tolerance) -> str:
    contractive, _ = normalized(alpha)
    r = build_root(contractive, tol)
    if not diagnose_root(r, tol):
        return FAIL
    if not all(check_power_formula(contractive, k, tol) for k in range(1, r.order_claim + 1)):
        return FAIL
    back = compress_to_nilpotent(r, tol)
    return _v(superoperator_distance(back, contractive) < 10 * tol.atol)


def instance_report(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL,
                    invariant: Sequence[Subspace] = (), seed: int = 0) -> dict:
    """Summary and verdicts for one map. IllConditioned propagates to the caller.

    ``invariant`` adds subspaces M (with α leaving B(M) invariant) to the
    majorization check on top of the ones derived from the flag.
    """
    rng = np.random.default_rng(seed)
    n = alpha.dim
    verdicts = dict.fromkeys(VERDICT_KEYS, NA)
    idx = index(alpha, tol)

    unit, _ = normalized(alpha)
    gap_k = subspace_distance(unit_kernel(alpha, tol), common_kernel(alpha.kraus, tol))
    gap_r = subspace_distance(unit_range(alpha, tol), adjoint_span(alpha, tol))
    killed = annihilated_vectors(alpha, tol).basis
    leak = max((float(np.linalg.norm(unit(np.outer(x, x.conj())))) for x in killed.T), default=0.0)
    verdicts["prop_2_1"] = _v(max(gap_k, gap_r) < tol.rtol and leak < tol.rtol)

    worst = 0.0
    for _ in range(3):
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        Y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        worst = max(worst, trace_duality_gap(unit, X, Y) / (np.linalg.norm(X) * np.linalg.norm(Y)))
    verdicts["trace_duality"] = _v(worst < tol.rtol)

    reduced = reduce_kraus(alpha, tol)
    same = superoperator_distance(normalized(reduced)[0], unit) < tol.rtol
    verdicts["kraus_reduction"] = _v(same and reduced.d == max(idx, 1))

    order = nilpotency_order(alpha, tol)
    order_adj = nilpotency_order(conjugate(alpha), tol)
    verdicts["prop_2_2"] = _products_verdict(alpha, order, tol)
    verdicts["prop_2_6"] = _v(order == order_adj)

    summary = {"n": n, "d": alpha.d, "index": idx, "order": order,
               "cp_type": None, "adjoint_type": None, "linear_type": None}
    if order is None:
        return {"summary": summary, "verdicts": verdicts, "commuting_flags": None}

    t = cp_type(alpha, tol)
    t_adj = cp_type(conjugate(alpha), tol)
    lin = linear_nilpotent_type(alpha, tol)
    summary.update(cp_type=list(t), adjoint_type=list(t_adj), linear_type=list(lin))

    verdicts["cor_2_5"] = _v(order <= n and len(t) == order and sum(t) == n)
    verdicts["thm_2_4"] = _v(check_basic_inequalities(t, max(idx, 1)))
    verdicts["thm_2_7"] = _v(len(t) == len(t_adj) and check_theorem_2_7(t, t_adj))
    verdicts["l_lower_bound"] = _v(len(lin) == len(t_adj) and check_l_lower_bound(lin, t_adj))
    verdicts["block_triangular"] = _v(check_block_triangular(alpha, flag(alpha, tol), tol))

    m = None
    try:
        m = commuting_flags_report(alpha, tol)
        verdicts["commuting_flags"] = NA if m is None else PASS
    except AssertionError:
        verdicts["commuting_flags"] = FAIL

    subspaces = flag_invariant_subspaces(alpha, tol) + list(invariant)
    if subspaces:
        verdicts["thm_3_1"] = _v(all(invariant_verdict(alpha, M, tol) for M in subspaces))
    verdicts["thm_4_3"] = _root_verdict(alpha, tol)
    return {"summary": summary, "verdicts": verdicts,
            "commuting_flags": None if m is None else m.tolist()}


def extreme_point_checks(x, rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL,
                         samples: int = 3) -> bool:
    """Count, distinctness, membership, extremality and convex decomposition for C(x)."""
    x = np.asarray(x, dtype=float)
    pts = extreme_points(x)
    if len(pts) != 2 ** (x.size - 1):
        return False
    if len({tuple(np.round(p, 9)) for p in pts}) != len(pts):
        return False
    if not all(cone_membership(x, p, tol) and verify_extreme(x, p, tol) for p in pts):
        return False
    for _ in range(samples):
        y = sample_cone(x, rng)
        if not cone_membership(x, y, tol) or convex_weights(pts, y)[1] >= tol.rtol:
            return False
    return True


def _family(t: int) -> str:
    return ("synthesized", "perturbed", "invariant", "cp_map")[t % 4]


def _draw(family: str, rng: np.random.Generator, n_max: int, d_max: int):
    if family == "synthesized":
        return random_nilpotent(rng, n_max, d_max), []
    if family == "perturbed":
        return make_contractive(random_nilpotent(rng, n_max, d_max, perturb=True), rng), []
    if family == "invariant":
        n = int(rng.integers(1, n_max + 1))
        alpha, M = random_invariant_instance(
            n, int(rng.integers(1, n + 1)), int(rng.integers(1, d_max + 1)), int(rng.integers(2**31)))
        return alpha, [M]
    return random_cp_map(rng, n_max, d_max + 1), []


def _draw_well_posed(family: str, rng: np.random.Generator, n_max: int, d_max: int,
                     tol: Tolerance, attempts: int = 20):
    """Redraw generic CP maps whose nilpotency test lands in the ambiguous band.

    Returns (alpha, extra, rejected). Constructed nilpotent families are never redrawn.
    """
    rejected = 0
    while True:
        alpha, extra = _draw(family, rng, n_max, d_max)
        if family != "cp_map" or rejected >= attempts:
            return alpha, extra, rejected
        try:
            nilpotency_order(alpha, tol)
            nilpotency_order(conjugate(alpha), tol)
            return alpha, extra, rejected
        except IllConditioned:
            rejected += 1


def run_verify(n_max: int, d_max: int, trials: int, seed: int, tol: Tolerance = DEFAULT_TOL,
               out_dir: Optional[Path] = None,
               progress: Optional[Callable[[int], None]] = None) -> dict:
    """Run every check over ``trials`` seeded instances; trial t uses default_rng([seed, t]).

    Failing instances are written to ``out_dir`` as instance files.
    """
    if n_max < 1 or d_max < 1 or trials < 1:
        raise ValueError("n_max, d_max and trials must all be >= 1")
    start = time.perf_counter()
    keys = VERDICT_KEYS + ("extreme_points",)
    counts = {k: {PASS: 0, FAIL: 0, NA: 0} for k in keys}
    failures = []
    ill = 0
    rejected = 0

    def dump(obj, t: int) -> Optional[str]:
        if out_dir is None:
            return None
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"counterexample_seed{seed}_trial{t}.json"
        jsonio.save(obj, path)
        return str(path)

    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        family = _family(t)
        alpha, extra, r = _draw_well_posed(family, rng, n_max, d_max, tol)
        rejected += r
        try:
            report = instance_report(alpha, tol, extra, seed=t)
        except IllConditioned as exc:
            ill += 1
            failures.append({"trial": t, "family": family, "ill_conditioned": str(exc),
                             "instance": dump(alpha, t)})
            continue
        bad = [k for k, v in report["verdicts"].items() if v == FAIL]
        for k, v in report["verdicts"].items():
            counts[k][v] += 1
        if bad:
            failures.append({"trial": t, "family": family, "failed": bad, "instance": dump(alpha, t)})

        x = rng.integers(1, 4, size=int(rng.integers(1, min(n_max, 5) + 1))).astype(float)
        ok = extreme_point_checks(x, rng, tol)
        counts["extreme_points"][_v(ok)] += 1
        if not ok:
            failures.append({"trial": t, "family": "vector", "failed": ["extreme_points"],
                             "instance": dump(x, t)})
        if progress is not None:
            progress(t)

    verdict_failures = sum(c[FAIL] for c in counts.values())
    return {
        "seed": seed,
        "trials": trials,
        "n_max": n_max,
        "d_max": d_max,
        "tolerance": tol.as_dict(),
        "counts": counts,
        "ill_conditioned": ill,
        "rejected_draws": rejected,
        "failures": failures,
        "status": "fail" if verdict_failures else ("ill_conditioned" if ill else "pass"),
        "wall_time_s": round(time.perf_counter() - start, 3),
    }

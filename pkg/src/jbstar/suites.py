"""Seeded property suites, one per statement tag, and report assembly.

Every trial receives its own generator derived from
``SeedSequence([seed, tag index, model index])``; trials may run on a
thread pool but records are assembled in a fixed order, so a report is a
pure function of its configuration (timing fields aside).
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .calculus import U, U_op, exp_element, peirce_projections, spectral_decompose, unitary_defect
from .errors import ConfigError, HypothesisNotMet, StructureMismatch
from .isometry import (
    chain_subdivide,
    check_condition_B,
    doubling_check,
    random_structured_isometry,
    random_unitaries,
    random_unitary,
    scalar_condition_B_enumeration,
    verify_inverted_triple_preservation,
)
from .isotope import isotope, midpoint_witness, rigidity_residual
from .models import parse_model
from .reconstruct import equivalence_witness, reconstruct
from .stone import (
    derivation_from_path,
    faulty_path,
    planted_path,
    recover_generator_details,
    structured_path,
    verify_group_law,
)

__all__ = [
    "TAGS",
    "DEFAULT_TOLERANCES",
    "ALBERT_RELAXATION",
    "JobConfig",
    "SuiteReport",
    "run_verify",
    "run_roundtrip",
    "run_stone",
]

ALBERT_RELAXATION = 1e2


@dataclass
class JobConfig:
    suites: tuple = ("all",)
    models: tuple = ("matrix:2",)
    trials: int = 20
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    out: str = None
    format: str = "json"
    workers: int = 1
    target: str = None

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        unknown = [s for s in self.suites if s != "all" and s not in TAGS]
        if unknown:
            raise ConfigError("unknown suite tag(s): %s" % ", ".join(unknown))
        bad = [k for k in self.tolerances if k not in TAGS and k not in EXTRA_TOLERANCES]
        if bad:
            raise ConfigError("unknown tolerance name(s): %s" % ", ".join(bad))
        if any(not v > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        if self.format not in ("json", "text"):
            raise ConfigError("format must be json or text")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.models:
            raise ConfigError("at least one model is required")
        return self

    def echo(self):
        return {
            "suites": list(self.suites),
            "models": list(self.models),
            "trials": self.trials,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "workers": self.workers,
            "target": self.target,
        }


@dataclass
class SuiteReport:
    records: list
    config: dict
    wall_time: float = 0.0

    @property
    def counts(self):
        out = {"pass": 0, "warn": 0, "fail": 0}
        for r in self.records:
            out[r["verdict"]] += 1
        return out

    @property
    def verdict(self):
        return "fail" if self.counts["fail"] else "pass"

    def to_dict(self, timing=True):
        d = {
            "records": self.records,
            "verdict": self.verdict,
            "counts": self.counts,
            "version": __version__,
            "config": self.config,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_text(self):
        lines = []
        for r in self.records:
            lines.append(
                "%-4s  %-22s %-24s trials=%-4d max=%.3e tol=%.1e%s"
                % (
                    r["verdict"].upper(),
                    r["tag"],
                    r["model"],
                    r["trials"],
                    r["max_residual"],
                    r["tolerance"],
                    "  (relaxed)" if r["relaxed"] else "",
                )
            )
        c = self.counts
        lines.append(
            "%s: %d pass, %d warn, %d fail in %.2fs"
            % (self.verdict.upper(), c["pass"], c["warn"], c["fail"], self.wall_time)
        )
        return "\n".join(lines) + "\n"


# --- trials -----------------------------------------------------------------
# Each trial returns (residual, info) with info a small dict of extras.


def _rel_op(A, scale):
    return float(np.linalg.norm(A, 2) / max(1.0, scale))


def trial_fundamental_identity(M, rng):
    a, b = M.random_element(rng), M.random_element(rng)
    Ua, Ub = U_op(M, a).matrix, U_op(M, b).matrix
    lhs = Ua @ Ub @ Ua
    rhs = U_op(M, Ua @ b).matrix
    scale = np.linalg.norm(Ua, 2) ** 2 * np.linalg.norm(Ub, 2)
    return _rel_op(lhs - rhs, scale), {}


def trial_jb_axiom(M, rng):
    a = M.random_element(rng, rng.uniform(0.2, 3.0))
    n3 = M.norm(a) ** 3
    return abs(M.norm(M.triple(a, a, a)) - n3) / n3, {}


def trial_power_assoc(M, rng):
    a = M.random_element(rng)
    s = max(1.0, M.norm(a))
    pw = [M.power(a, k) for k in range(7)]
    worst = 0.0
    for m in range(1, 4):
        for n in range(1, 4):
            worst = max(worst, M.norm(M.product(pw[m], pw[n]) - pw[m + n]) / s ** (m + n))
    return float(worst), {}


def random_tripotent(M, rng):
    """``exp(i h) o q`` with ``q`` a sum of spectral projections of ``h``."""
    h = M.random_self_adjoint(rng, rng.uniform(0.5, 3.0))
    sd = spectral_decompose(M, h)
    pick = rng.random(len(sd.eigenvalues)) < 0.5
    q = np.sum(sd.projections[pick], axis=0) if pick.any() else M.zero()
    return M.product(exp_element(M, 1j * h), q)


def trial_peirce(M, rng):
    e = random_tripotent(M, rng)
    P2, P1, P0 = (P.matrix for P in peirce_projections(M, e))
    L = M.box_op(e, e)
    eye = np.eye(M.dim)
    res = [
        np.linalg.norm(P2 + P1 + P0 - eye, 2),
        max(np.linalg.norm(P @ P - P, 2) for P in (P2, P1, P0)),
        max(np.linalg.norm(P @ Q, 2) for P, Q in ((P2, P1), (P2, P0), (P1, P0))),
        max(np.linalg.norm(L @ P - (k / 2) * P, 2) for k, P in ((2, P2), (1, P1), (0, P0))),
    ]
    return float(max(res)), {}


def trial_lemma_isotope(M, rng):
    u = random_unitary(M, rng)
    Mu = isotope(M, u)
    x, y = M.random_element(rng), M.random_element(rng)
    x2 = Mu.product(x, x)
    jordan = Mu.norm(Mu.product(Mu.product(x, y), x2) - Mu.product(x, Mu.product(y, x2)))
    v1, v2 = random_unitaries(M, rng, 2)
    w = exp_element(Mu, 1j * Mu.random_self_adjoint(rng, 2.0))
    us = M.star(u)
    iso = abs(M.norm(U(M, us, v1) - U(M, us, v2)) - M.norm(v1 - v2))
    res = [
        M.norm(Mu.product(u, x) - x) / M.norm(x),
        jordan / max(1.0, M.norm(x) ** 3 * M.norm(y)),
        unitary_defect(Mu, v1),
        unitary_defect(M, w),
        iso,
    ]
    return float(max(res)), {}


def trial_short_distance(M, rng):
    u = random_unitary(M, rng)
    Mu = isotope(M, u)
    t0 = rng.uniform(0.05, 3.0)
    v = exp_element(Mu, 1j * Mu.random_self_adjoint(rng, t0))
    w = midpoint_witness(M, u, v)
    bound = np.sqrt(2) * np.sqrt(1 - np.cos(t0 / 2))
    dist_err = abs(M.norm(u - v) - np.sqrt(2) * np.sqrt(1 - np.cos(t0)))
    res = [M.norm(U(M, w, M.star(u)) - v), max(0.0, M.norm(w - u) - bound), dist_err]
    return float(max(res)), {}


def rigidity_instance(M, rng):
    """A hypothesis-satisfying pair ``(u, w)`` produced by a round trip.

    ``w = U_{a*}(U_a(u))`` for a random unitary ``a`` equals ``u`` only up
    to rounding, so the rigidity conclusion is tested on a computed ``w``.
    """
    u = random_unitary(M, rng)
    a = random_unitary(M, rng)
    return u, U(M, M.star(a), U(M, a, u))


def trial_rigidity(M, rng):
    u, w = rigidity_instance(M, rng)
    r = rigidity_residual(M, u, w)
    try:  # w = -u sits on the boundary ||u - w|| = 2 and must be refused
        rigidity_residual(M, u, -u, strict=True)
        flagged = False
    except HypothesisNotMet:
        flagged = True
    return (r.residual if r.hypothesis_met and flagged else float("inf")), {}


def _nearby_pair(M, rng, radius=0.5):
    u = random_unitary(M, rng)
    Mu = isotope(M, u)
    v = exp_element(Mu, 1j * Mu.random_self_adjoint(rng, rng.uniform(0.05, radius)))
    return u, v


def trial_condition_B(M, rng):
    u, v = _nearby_pair(M, rng, 0.45)
    rep = check_condition_B(M, u, v, seed=rng)
    return max(0.0, -rep.worst_margin), {"nontrivial": rep.nontrivial_count > 0}


def trial_preservation(M, rng):
    sigma = random_structured_isometry(M, M, rng)
    u, v = _nearby_pair(M, rng, 0.5)
    return verify_inverted_triple_preservation(sigma, M, M, u, v), {}


def trial_doubling(M, rng):
    sigma = random_structured_isometry(M, M, rng)
    h = M.random_self_adjoint(rng, rng.uniform(0.2, 3.0))
    t, s = rng.uniform(-2, 2, 2)
    chain = chain_subdivide(M, h, s, t, m=int(rng.integers(0, 7)))
    res = doubling_check(sigma, M, M, chain)
    return max(res.endpoint_residual, res.endpoint_identity), {"m": chain.m}


def trial_stone(M, rng):
    h = M.random_self_adjoint(rng, rng.uniform(0.1, 6.0))
    path = planted_path(M, h)
    rec = recover_generator_details(path, seed=rng)
    err = M.norm(rec.h - h) / max(1.0, M.norm(h))
    der = derivation_from_path(path, recovery=rec)
    sigma = random_structured_isometry(M, M, rng)

    def delta0(X):
        return U(M, sigma.omega, sigma(X))

    delta0.batched = True
    law = verify_group_law(structured_path(delta0, M, M, h), seed=rng)
    return float(max(err, der.leibniz, der.unit_residual, law)), {}


def trial_stone_fault(M, rng):
    h = M.random_self_adjoint(rng, rng.uniform(0.5, 3.0))
    r = verify_group_law(faulty_path(M, h), seed=rng)
    # residual is the shortfall below the detection threshold
    return max(0.0, 1e-2 - r), {"law": r}


def trial_main(M, rng, N=None):
    N = M if N is None else N
    sigma = random_structured_isometry(M, N, rng)
    rep = reconstruct(sigma, M, N, seed=rng)
    rep2 = reconstruct(sigma, M, N, seed=rng, t_start=0.0625, probes=10, spot_pairs=5)
    probe = random_unitaries(M, 2024, 20)
    uniq = float(np.max(np.atleast_1d(N.norm(rep.psi(probe) - rep2.psi(probe)))))
    p_ok = rep.p_snapped and np.array_equal(rep.p, sigma.p)
    ok = rep.verdict != "fail" and p_ok
    res = max(rep.residuals["extension_sup"], uniq) if ok else float("inf")
    return res, {"p_match": bool(p_ok)}


def trial_equivalence(M, rng, N=None):
    N = M if N is None else N
    a = equivalence_witness(M, N, "a->c", seed=rng)
    c = equivalence_witness(M, N, "c->a", seed=rng)
    if not (a.ok and c.ok):
        return float("inf"), {}
    return float(max(max(a.residuals.values()), c.residuals["phi_invariants"])), {}


@dataclass(frozen=True)
class Suite:
    trial: object
    tolerance: float
    min_pass_fraction: float = 1.0
    pair: bool = False  # trial takes a target model too


SUITES = {
    "fundamental-identity": Suite(trial_fundamental_identity, 1e-9),
    "jb-axiom": Suite(trial_jb_axiom, 1e-7),
    "power-assoc": Suite(trial_power_assoc, 1e-9),
    "peirce": Suite(trial_peirce, 1e-9),
    "lemma-isotope": Suite(trial_lemma_isotope, 1e-9),
    "lemma-short-distance": Suite(trial_short_distance, 1e-8),
    "lemma-rigidity": Suite(trial_rigidity, 1e-6),
    "lemma-condition-B": Suite(trial_condition_B, 1e-7),
    "thm-preservation": Suite(trial_preservation, 1e-8),
    "lemma-doubling": Suite(trial_doubling, 1e-7),
    "thm-stone": Suite(trial_stone, 1e-7),
    "thm-main": Suite(trial_main, 1e-6, 0.99, pair=True),
    "cor-equivalence": Suite(trial_equivalence, 1e-8, pair=True),
}
TAGS = tuple(SUITES)
EXTRA_TOLERANCES = {"thm-stone-fault": 0.0, "condition-B-scalar": 0.0}
DEFAULT_TOLERANCES = {k: s.tolerance for k, s in SUITES.items()}


def _involves_albert(M):
    return "albert" in repr(M.signature())


def _trial_seeds(seed, tag, model_index, trials):
    tag_index = list(TAGS).index(tag) if tag in TAGS else len(TAGS) + list(EXTRA_TOLERANCES).index(tag)
    return np.random.SeedSequence([int(seed), tag_index, model_index]).spawn(trials)


def _run_trials(fn, seeds, workers):
    def one(ss):
        return fn(np.random.default_rng(ss))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, seeds))
    return [one(ss) for ss in seeds]


def _record(tag, model_name, results, tol, relaxed, min_frac=1.0, extra=None):
    res = np.array([r for r, _ in results], dtype=float)
    passed = int(np.sum(res <= tol))
    frac = passed / len(res)
    verdict = "pass" if frac >= min_frac else "fail"
    rec = {
        "tag": tag,
        "model": model_name,
        "trials": len(res),
        "max_residual": float(np.max(res)),
        "tolerance": float(tol),
        "relaxed": bool(relaxed),
        "passed_trials": passed,
        "verdict": verdict,
    }
    if extra:
        rec.update(extra)
    return rec


def _tolerance(config, tag, M):
    tol = config.tolerances.get(tag, DEFAULT_TOLERANCES.get(tag, 0.0))
    relaxed = _involves_albert(M) and tag not in config.tolerances
    if relaxed:
        tol *= ALBERT_RELAXATION
    return tol, relaxed


def _parse_models(config):
    try:
        return [parse_model(s) for s in config.models]
    except Exception as exc:  # malformed model strings are configuration errors
        raise ConfigError(str(exc)) from exc


def _target(config, M):
    if config.target is None:
        return parse_model(M.spec_string())
    try:
        N = parse_model(config.target)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc
    if N.signature() != M.signature():
        raise StructureMismatch("%s and %s are not structurally identical" % (M.spec_string(), config.target))
    return N


def _run_tag(config, tag, idx, M, name):
    suite = SUITES[tag]
    tol, relaxed = _tolerance(config, tag, M)
    seeds = _trial_seeds(config.seed, tag, idx, config.trials)
    if suite.pair:
        N = _target(config, M)
        fn = lambda rng: suite.trial(M, rng, N)  # noqa: E731
        name = "%s -> %s" % (name, N.spec_string())
    else:
        fn = lambda rng: suite.trial(M, rng)  # noqa: E731
    results = _run_trials(fn, seeds, config.workers)
    extra = None
    rec = _record(tag, name, results, tol, relaxed, suite.min_pass_fraction)
    if tag == "lemma-condition-B":
        frac = float(np.mean([info["nontrivial"] for _, info in results]))
        extra = {"nontrivial_fraction": frac}
        if rec["verdict"] == "pass" and frac < 0.5:
            rec["verdict"] = "warn"
    if tag == "thm-main":
        extra = {"p_match_fraction": float(np.mean([info["p_match"] for _, info in results]))}
    if extra:
        rec.update(extra)
    return rec


def _scalar_condition_B_record():
    _, rep = scalar_condition_B_enumeration()
    ok = rep.member_count >= 3 and rep.verdict != "fail"
    return {
        "tag": "lemma-condition-B",
        "model": "scalar-enumeration",
        "trials": 1,
        "max_residual": float(max(0.0, -rep.worst_margin)),
        "tolerance": 1e-7,
        "relaxed": False,
        "passed_trials": int(ok),
        "verdict": "pass" if ok else "fail",
        "members": rep.member_count,
    }


def _finish(records, config, start):
    records.sort(key=lambda r: (r["tag"], r["model"]))
    return SuiteReport(records, config.echo(), time.perf_counter() - start)


def run_verify(config):
    config.validate()
    start = time.perf_counter()
    models = _parse_models(config)
    tags = TAGS if "all" in config.suites else tuple(t for t in TAGS if t in config.suites)
    records = []
    for tag in tags:
        for idx, M in enumerate(models):
            records.append(_run_tag(config, tag, idx, M, config.models[idx]))
        if tag == "lemma-condition-B":
            records.append(_scalar_condition_B_record())
    return _finish(records, config, start)


def run_roundtrip(config):
    config.validate()
    start = time.perf_counter()
    models = _parse_models(config)
    records = [_run_tag(config, "thm-main", idx, M, config.models[idx]) for idx, M in enumerate(models)]
    return _finish(records, config, start)


def run_stone(config):
    config.validate()
    start = time.perf_counter()
    models = _parse_models(config)
    records = []
    for idx, M in enumerate(models):
        name = config.models[idx]
        records.append(_run_tag(config, "thm-stone", idx, M, name))
        seeds = _trial_seeds(config.seed, "thm-stone-fault", idx, config.trials)
        results = _run_trials(lambda rng: trial_stone_fault(M, rng), seeds, config.workers)
        rec = _record("thm-stone-fault", name, results, 0.0, False)
        rec["expected_failure"] = True
        rec["min_law_residual"] = float(min(info["law"] for _, info in results))
        records.append(rec)
    return _finish(records, config, start)

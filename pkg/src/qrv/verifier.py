"""Robustness verification of quantum classifiers.

A state rho with correct label l is epsilon-robust when no state sigma
with ``1 - F(rho, sigma) <= epsilon`` is classified away from l.  The
verification stack:

* a margin bound: ``sqrt(p_1) - sqrt(p_2) > sqrt(2 epsilon)`` certifies
  robustness from the outcome probabilities alone;
* the optimal robust bound ``delta``: for every rival class k, minimize
  ``1 - F(rho, sigma)`` over states satisfying the class-flip constraint
  ``tr[(M_l^dag M_l - M_k^dag M_k) channel(sigma)] <= 0`` (a semidefinite
  program); rho is epsilon-robust iff ``epsilon <= delta``;
* a direct feasibility check at level epsilon for the same constraints;
* a pure-state variant restricting adversaries to pure states (a
  nonconvex quadratic program, attacked by multi-start local solves);
* dataset drivers that filter with the margin bound and fall back to the
  exact bound only where the filter is inconclusive, collecting
  adversarial examples along the way.

Misclassified dataset entries are a correctness failure, not a
robustness failure: they are excluded from robustness verdicts and
reported separately, while the robust-accuracy denominator stays the
full dataset size.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from .classifiers import (
    Classification,
    Classifier,
    LabeledDataset,
    WELL_TRAINED_THRESHOLD,
    classify,
)
from .config import DEFAULT_POLICY, NumericPolicy
from .errors import MisclassifiedInput, SolverFailure, ValidationError
from .sdp import (
    EQ,
    LE,
    SolverOptions,
    embed_matrix,
    extract_fidelity_solution,
    solve,
    solve_feasibility,
    sqrt_fidelity_sdp,
)
from .states import (
    DensityMatrix,
    PureState,
    fidelity,
    project_to_density,
    pure_to_density,
)

__all__ = [
    "VerifyOptions",
    "AdversarialWitness",
    "OptimalBound",
    "RobustnessCheck",
    "PureBound",
    "StateVerdict",
    "VerificationReport",
    "margin_robust_bound",
    "compute_optimal_bound",
    "check_epsilon_robust",
    "pure_state_optimal_bound",
    "verify_dataset",
    "under_robust_accuracy",
]

MIXED = "mixed"
PURE = "pure"


def _require_epsilon(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    return eps


@dataclass(frozen=True)
class VerifyOptions:
    """Knobs for the verification drivers."""

    mode: str = MIXED  # "mixed": adversaries range over density matrices;
    #                    "pure": pure-state adversaries for pure entries
    workers: int = 1
    seed: int = 0
    qcqp_starts: int = 32
    solver: SolverOptions | None = None
    policy: NumericPolicy = DEFAULT_POLICY
    collect_adversarial: bool = True

    def __post_init__(self):
        if self.mode not in (MIXED, PURE):
            raise ValidationError(f"mode must be 'mixed' or 'pure', got {self.mode!r}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    def solver_options(self) -> SolverOptions:
        return self.solver or SolverOptions.from_policy(self.policy)


@dataclass(frozen=True)
class AdversarialWitness:
    """An extracted adversarial example."""

    sigma: DensityMatrix | PureState
    target_class: int
    distance: float  # 1 - F(rho, sigma)
    source_index: int | None = None


@dataclass(frozen=True)
class OptimalBound:
    """Largest radius with no adversarial example, plus its witness."""

    delta: float | None  # None encodes an unbounded radius
    unbounded: bool
    argmin_class: int | None
    sigma_star: DensityMatrix | None
    per_class: dict
    sdp_solves: int = 0
    sdp_iterations: int = 0

    def robust_at(self, eps: float) -> bool:
        return self.unbounded or eps <= self.delta


@dataclass(frozen=True)
class RobustnessCheck:
    robust: bool
    witness: AdversarialWitness | None
    per_class_feasible: dict
    sdp_solves: int = 0


@dataclass(frozen=True)
class PureBound:
    """Best pure-state bound found by multi-start local optimization.

    ``delta`` is an upper bound on the true pure-state optimum (local
    solves cannot certify global optimality).  ``status`` is ``ok`` when
    every reachable rival class produced converged starts, ``partial``
    when some did not, and ``inconclusive`` when none did (never treat an
    inconclusive result as a robustness certificate).
    """

    status: str
    delta: float | None
    unbounded: bool
    argmin_class: int | None
    phi_star: PureState | None
    per_class: dict


def margin_robust_bound(
    classifier: Classifier,
    state,
    eps: float,
    *,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> bool:
    """Margin certificate: sqrt(p_1) - sqrt(p_2) > sqrt(2 eps).

    True certifies eps-robustness; False is inconclusive, not a
    counterexample.
    """
    eps = _require_epsilon(eps)
    outcome = classify(classifier, state, policy=policy)
    return outcome.margin > np.sqrt(2.0 * eps)


def _classification_for_label(
    classifier: Classifier, state, label: int | None, policy: NumericPolicy
) -> tuple[Classification, int]:
    outcome = classify(classifier, state, policy=policy)
    if label is None:
        label = outcome.label_index
    elif outcome.label_index != label:
        raise MisclassifiedInput(
            f"state is classified as {outcome.label_index}, not the stated "
            f"label {label}; robustness of a misclassified state is undefined"
        )
    return outcome, int(label)


def _solve_with_retry(problem, opts: SolverOptions):
    solution = solve(problem, opts)
    if solution.status == "optimal":
        return solution
    # One retry with a looser gap keeps marginal instances alive without
    # compromising the 1e-5 witness-distance contract.
    loose = replace(opts, gap_tol=max(opts.gap_tol * 100, 1e-6),
                    feas_tol=max(opts.feas_tol * 10, 1e-6))
    retry = solve(problem, loose)
    if retry.status == "optimal":
        return retry
    raise SolverFailure(
        f"optimal-bound SDP failed: {solution.status} then {retry.status}"
    )


def _polish_witness(
    gap_operator: np.ndarray,
    sigma: DensityMatrix,
    rho: DensityMatrix,
    budget: float,
    policy: NumericPolicy,
) -> DensityMatrix:
    """Nudge a boundary witness into the rival class when nearly tied.

    The optimal sigma sits on the decision boundary; mixing in a sliver
    of the gap operator's most negative eigenvector makes the class
    change strict when that costs less than ``budget`` extra distance.
    """
    value = float(np.real(np.trace(gap_operator @ sigma.matrix)))
    if value < -policy.tie_tol:
        return sigma
    w, v = np.linalg.eigh(gap_operator)
    if w[0] >= 0.0:
        return sigma
    direction = np.outer(v[:, 0], v[:, 0].conj())
    base_distance = 1.0 - fidelity(rho, sigma, policy=policy)
    for t in (1e-9, 1e-8, 1e-7, 1e-6, 1e-5):
        mixed = project_to_density(
            (1.0 - t) * sigma.matrix + t * direction, policy=policy
        )
        if float(np.real(np.trace(gap_operator @ mixed.matrix))) >= -policy.tie_tol:
            continue
        if 1.0 - fidelity(rho, mixed, policy=policy) <= base_distance + budget:
            return mixed
    return sigma


def compute_optimal_bound(
    classifier: Classifier,
    state,
    label: int | None = None,
    *,
    options: VerifyOptions | None = None,
) -> OptimalBound:
    """Optimal robust bound delta = min over rival classes of the class-flip
    distance, each computed by the sqrt-fidelity block SDP.

    A rival class whose flip constraint is infeasible (its gap operator is
    positive definite) contributes an unbounded radius; when every rival is
    unreachable the state is robust at every eps < 1.
    """
    opts = options or VerifyOptions()
    policy = opts.policy
    rho = pure_to_density(state, policy=policy) if isinstance(state, PureState) else state
    _, label = _classification_for_label(classifier, rho, label, policy)

    sdp_opts = opts.solver_options()
    identity = np.eye(classifier.dim, dtype=complex)
    per_class: dict = {}
    best = None  # (delta_k, k, sigma_k, gap_operator)
    solves = 0
    iterations = 0
    for k in range(classifier.n_classes):
        if k == label:
            continue
        gap = classifier.class_gap_operator(label, k)
        if float(np.linalg.eigvalsh(gap)[0]) > 0.0:
            per_class[k] = None  # class unreachable by any state
            continue
        problem = sqrt_fidelity_sdp(
            rho, [(identity, EQ, 1.0), (gap, LE, 0.0)], policy=policy
        )
        solution = _solve_with_retry(problem, sdp_opts)
        solves += 1
        iterations += solution.iterations
        sqrt_f, sigma_raw = extract_fidelity_solution(problem, solution.X)
        delta_k = min(max(1.0 - sqrt_f * sqrt_f, 0.0), 1.0)
        per_class[k] = delta_k
        if best is None or delta_k < best[0]:
            sigma_k = project_to_density(sigma_raw, policy=policy)
            best = (delta_k, k, sigma_k, gap)

    if best is None:
        return OptimalBound(
            delta=None, unbounded=True, argmin_class=None, sigma_star=None,
            per_class=per_class, sdp_solves=solves, sdp_iterations=iterations,
        )
    delta, k_star, sigma_star, gap = best
    sigma_star = _polish_witness(gap, sigma_star, rho, budget=1e-6, policy=policy)
    return OptimalBound(
        delta=delta, unbounded=False, argmin_class=k_star, sigma_star=sigma_star,
        per_class=per_class, sdp_solves=solves, sdp_iterations=iterations,
    )


def check_epsilon_robust(
    classifier: Classifier,
    state,
    label: int | None,
    eps: float,
    *,
    options: VerifyOptions | None = None,
) -> RobustnessCheck:
    """Direct eps-robustness decision via per-class feasibility programs.

    For each rival class, ask whether some state satisfies the class-flip
    constraint together with ``1 - F(rho, sigma) <= eps`` (imposed as a
    floor on the block objective).  The state is robust iff every such
    system is infeasible; otherwise the feasible witness of smallest
    distance is returned.
    """
    eps = _require_epsilon(eps)
    opts = options or VerifyOptions()
    policy = opts.policy
    rho = pure_to_density(state, policy=policy) if isinstance(state, PureState) else state
    _, label = _classification_for_label(classifier, rho, label, policy)

    sdp_opts = opts.solver_options()
    identity = np.eye(classifier.dim, dtype=complex)
    sqrt_floor = float(np.sqrt(1.0 - eps))
    per_class: dict = {}
    witnesses = []
    solves = 0
    for k in range(classifier.n_classes):
        if k == label:
            continue
        gap = classifier.class_gap_operator(label, k)
        if float(np.linalg.eigvalsh(gap)[0]) > 0.0:
            per_class[k] = False
            continue
        problem = sqrt_fidelity_sdp(
            rho, [(identity, EQ, 1.0), (gap, LE, 0.0)], policy=policy
        ).with_fidelity_floor(sqrt_floor)
        feasible, x_opt, _info = solve_feasibility(problem, sdp_opts)
        solves += 1
        per_class[k] = feasible
        if feasible:
            _, sigma_raw = extract_fidelity_solution(problem, x_opt)
            sigma = project_to_density(sigma_raw, policy=policy)
            sigma = _polish_witness(gap, sigma, rho, budget=1e-6, policy=policy)
            distance = 1.0 - fidelity(rho, sigma, policy=policy)
            witnesses.append(AdversarialWitness(sigma, k, distance))

    if not witnesses:
        return RobustnessCheck(robust=True, witness=None,
                               per_class_feasible=per_class, sdp_solves=solves)
    witness = min(witnesses, key=lambda w: w.distance)
    return RobustnessCheck(robust=False, witness=witness,
                           per_class_feasible=per_class, sdp_solves=solves)


# ---------------------------------------------------------------------------
# Pure-state bound (nonconvex quadratic program, multi-start local solves)


def _embedded_vector(phi: np.ndarray) -> np.ndarray:
    return np.concatenate([phi.real, phi.imag])


def _complex_vector(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def _qcqp_starts(
    psi: np.ndarray, gap: np.ndarray, n_starts: int, rng: np.random.Generator
) -> list[np.ndarray]:
    dim = psi.size
    starts = [psi]
    w, vecs = np.linalg.eigh(gap)
    for idx in np.argsort(w):
        v = vecs[:, idx]
        phase = np.vdot(v, psi)
        if abs(phase) > 1e-12:
            v = v * (phase / abs(phase))
        starts.append(v)
        mix = psi + v
        norm = np.linalg.norm(mix)
        if norm > 1e-9:
            starts.append(mix / norm)
    while len(starts) < n_starts:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        starts.append(v / np.linalg.norm(v))
    return starts[:n_starts]


def _pure_bound_for_class(
    psi: np.ndarray,
    gap: np.ndarray,
    n_starts: int,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray] | None:
    """min 1 - |<phi|psi>|^2 over unit phi with <phi|gap|phi> <= 0.

    Solved in real coordinates by sequential quadratic programming from
    many starts, with a unit-sphere retraction on each candidate; returns
    the best feasible local optimum or None when no start converged.
    """
    p_emb = embed_matrix(np.outer(psi, psi.conj()))
    q_emb = embed_matrix(gap)

    def objective(x):
        return 1.0 - x @ (p_emb @ x)

    def objective_jac(x):
        return -2.0 * (p_emb @ x)

    constraints = (
        {"type": "eq", "fun": lambda x: x @ x - 1.0, "jac": lambda x: 2.0 * x},
        {"type": "ineq", "fun": lambda x: -(x @ (q_emb @ x)),
         "jac": lambda x: -2.0 * (q_emb @ x)},
    )

    best: tuple[float, np.ndarray] | None = None
    for phi0 in _qcqp_starts(psi, gap, n_starts, rng):
        x0 = _embedded_vector(phi0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = scipy.optimize.minimize(
                objective, x0, jac=objective_jac, method="SLSQP",
                constraints=constraints,
                options={"maxiter": 300, "ftol": 1e-12},
            )
        x = result.x
        norm = np.linalg.norm(x)
        if not np.isfinite(norm) or norm < 1e-9:
            continue
        x = x / norm  # retraction back onto the sphere
        if x @ (q_emb @ x) > 1e-8:
            continue
        value = float(np.clip(1.0 - x @ (p_emb @ x), 0.0, 1.0))
        if best is None or value < best[0]:
            best = (value, x)
    if best is None:
        return None
    return best[0], _complex_vector(best[1])


def pure_state_optimal_bound(
    classifier: Classifier,
    psi: PureState,
    label: int | None = None,
    *,
    options: VerifyOptions | None = None,
) -> PureBound:
    """Optimal robust bound against pure-state adversaries.

    Minimizes ``1 - |<phi|psi>|^2`` over unit vectors satisfying the
    class-flip constraint for each rival class.  The feasible set of pure
    states is nonconvex, so this returns the best local optimum across
    ``options.qcqp_starts`` starts (the state itself, the flip operator's
    eigenvectors and mixes, then random states): an upper bound on the
    true pure-state radius, never below the mixed-state bound.
    """
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    opts = options or VerifyOptions()
    policy = opts.policy
    _, label = _classification_for_label(classifier, psi, label, policy)
    rng = np.random.default_rng(opts.seed)

    per_class: dict = {}
    best = None
    reachable = 0
    converged = 0
    for k in range(classifier.n_classes):
        if k == label:
            continue
        gap = classifier.class_gap_operator(label, k)
        if float(np.linalg.eigvalsh(gap)[0]) > 0.0:
            per_class[k] = None  # unreachable rival class
            continue
        reachable += 1
        found = _pure_bound_for_class(psi.amplitudes, gap, opts.qcqp_starts, rng)
        if found is None:
            per_class[k] = "failed"
            continue
        converged += 1
        delta_k, phi = found
        per_class[k] = delta_k
        if best is None or delta_k < best[0]:
            best = (delta_k, k, phi)

    if reachable == 0:
        return PureBound(status="ok", delta=None, unbounded=True,
                         argmin_class=None, phi_star=None, per_class=per_class)
    if converged == 0:
        return PureBound(status="inconclusive", delta=None, unbounded=False,
                         argmin_class=None, phi_star=None, per_class=per_class)
    status = "ok" if converged == reachable else "partial"
    delta, k_star, phi = best
    return PureBound(status=status, delta=delta, unbounded=False,
                     argmin_class=k_star, phi_star=PureState(phi, policy=policy),
                     per_class=per_class)


# ---------------------------------------------------------------------------
# Dataset drivers


@dataclass(frozen=True)
class StateVerdict:
    """Outcome of verifying one dataset entry."""

    index: int
    label: int
    predicted: int
    correct: bool
    margin: float
    tie: bool
    margin_certified: bool
    status: str  # ok | misclassified | solver_failure | inconclusive
    delta: float | None = None
    delta_unbounded: bool = False
    robust: bool | None = None
    adversarial_class: int | None = None
    adversarial_distance: float | None = None


@dataclass
class VerificationReport:
    epsilon: float
    mode: str
    n_states: int
    n_correct: int
    accuracy: float
    robust_accuracy: float
    under_approx_robust_accuracy: float
    verdicts: list
    adversarial: list
    timings: dict
    solver_stats: dict
    warnings: list = field(default_factory=list)
    seed: int = 0

    @property
    def adversarial_count(self) -> int:
        return len(self.adversarial)


def under_robust_accuracy(
    classifier: Classifier,
    dataset: LabeledDataset,
    eps: float,
    *,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """Margin-only under-approximation of the robust accuracy.

    Counts every entry whose margin fails the certificate as potentially
    non-robust; no semidefinite programs are solved, so this scales to
    large datasets at classification cost.
    """
    eps = _require_epsilon(eps)
    if len(dataset) == 0:
        raise ValidationError("dataset is empty")
    threshold = np.sqrt(2.0 * eps)
    flagged = sum(
        1
        for state, _label in dataset
        if classify(classifier, state, policy=policy).margin <= threshold
    )
    return 1.0 - flagged / len(dataset)


def _verify_entry(classifier, state, label, eps, opts):
    """Exact verdict for one margin-inconclusive, correctly classified entry."""
    use_pure = opts.mode == PURE and isinstance(state, PureState)
    if use_pure:
        bound = pure_state_optimal_bound(classifier, state, label, options=opts)
        if bound.status == "inconclusive":
            return {"status": "inconclusive"}
        robust = bound.unbounded or eps <= bound.delta
        out = {
            "status": "ok",
            "delta": bound.delta,
            "unbounded": bound.unbounded,
            "robust": robust,
            "solves": 0,
            "iterations": 0,
        }
        if not robust and bound.phi_star is not None:
            out["witness"] = AdversarialWitness(
                bound.phi_star, bound.argmin_class, bound.delta
            )
        return out
    bound = compute_optimal_bound(classifier, state, label, options=opts)
    robust = bound.robust_at(eps)
    out = {
        "status": "ok",
        "delta": bound.delta,
        "unbounded": bound.unbounded,
        "robust": robust,
        "solves": bound.sdp_solves,
        "iterations": bound.sdp_iterations,
    }
    if not robust and bound.sigma_star is not None:
        out["witness"] = AdversarialWitness(
            bound.sigma_star, bound.argmin_class, bound.delta
        )
    return out


def verify_dataset(
    classifier: Classifier,
    dataset: LabeledDataset,
    eps: float,
    *,
    options: VerifyOptions | None = None,
) -> VerificationReport:
    """Filter-then-solve robustness verification of a labeled dataset.

    Every entry is classified once; misclassified entries are recorded as
    correctness failures and skipped.  Entries whose margin passes the
    certificate are robust with no further work; the rest get the exact
    bound, and each non-robust entry contributes its witness to the
    adversarial set R.  Robust accuracy is ``1 - |R| / |T|``.

    Per-entry solver failures never abort the batch: the entry is flagged
    and a warning recorded, leaving the rest of the report actionable.
    """
    eps = _require_epsilon(eps)
    opts = options or VerifyOptions()
    policy = opts.policy
    if len(dataset) == 0:
        raise ValidationError("dataset is empty")
    dataset.check_compatible(classifier)

    t_start = time.perf_counter()
    threshold = np.sqrt(2.0 * eps)
    outcomes = [classify(classifier, state, policy=policy) for state, _ in dataset]
    t_margin = time.perf_counter() - t_start

    n = len(dataset)
    n_correct = sum(
        1 for (s, label), c in zip(dataset, outcomes) if c.label_index == label
    )
    accuracy_value = n_correct / n
    flagged_all = sum(1 for c in outcomes if c.margin <= threshold)
    ura = 1.0 - flagged_all / n

    warnings_list = []
    if accuracy_value < WELL_TRAINED_THRESHOLD:
        warnings_list.append(
            f"classifier accuracy {accuracy_value:.4f} is below the "
            f"well-trained threshold {WELL_TRAINED_THRESHOLD}; verdicts are "
            "still exact but the classifier may be undertrained"
        )

    jobs = []
    verdicts: list[StateVerdict | None] = [None] * n
    for i, ((state, label), outcome) in enumerate(zip(dataset, outcomes)):
        base = dict(
            index=i,
            label=label,
            predicted=outcome.label_index,
            correct=outcome.label_index == label,
            margin=outcome.margin,
            tie=outcome.tie,
            margin_certified=False,
        )
        if outcome.label_index != label:
            verdicts[i] = StateVerdict(status="misclassified", **base)
        elif outcome.margin > threshold:
            verdicts[i] = StateVerdict(
                status="ok", robust=True, **{**base, "margin_certified": True}
            )
        else:
            jobs.append((i, state, label, base))

    t_sdp_start = time.perf_counter()
    solver_stats = {"sdp_solves": 0, "sdp_iterations": 0, "failures": 0}
    adversarial: list[AdversarialWitness] = []

    def run_job(job):
        i, state, label, base = job
        try:
            return i, base, _verify_entry(classifier, state, label, eps, opts), None
        except SolverFailure as exc:
            return i, base, None, f"state {i}: {exc}"

    if opts.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(run_job, jobs))
    else:
        results = [run_job(job) for job in jobs]

    for i, base, result, error in results:
        if error is not None:
            solver_stats["failures"] += 1
            warnings_list.append(error)
            verdicts[i] = StateVerdict(status="solver_failure", **base)
            continue
        if result["status"] == "inconclusive":
            solver_stats["failures"] += 1
            warnings_list.append(
                f"state {i}: pure-state search inconclusive, excluded from R"
            )
            verdicts[i] = StateVerdict(status="inconclusive", **base)
            continue
        solver_stats["sdp_solves"] += result["solves"]
        solver_stats["sdp_iterations"] += result["iterations"]
        witness = result.get("witness")
        if witness is not None and opts.collect_adversarial:
            witness = AdversarialWitness(
                witness.sigma, witness.target_class, witness.distance, source_index=i
            )
            adversarial.append(witness)
        verdicts[i] = StateVerdict(
            status="ok",
            delta=result["delta"],
            delta_unbounded=result["unbounded"],
            robust=result["robust"],
            adversarial_class=witness.target_class if witness else None,
            adversarial_distance=witness.distance if witness else None,
            **base,
        )

    non_robust = sum(1 for v in verdicts if v is not None and v.robust is False)
    t_sdp = time.perf_counter() - t_sdp_start
    total = time.perf_counter() - t_start
    adversarial.sort(key=lambda w: w.source_index)

    return VerificationReport(
        epsilon=eps,
        mode=opts.mode,
        n_states=n,
        n_correct=n_correct,
        accuracy=accuracy_value,
        robust_accuracy=1.0 - non_robust / n,
        under_approx_robust_accuracy=ura,
        verdicts=verdicts,
        adversarial=adversarial,
        timings={
            "margin_seconds": t_margin,
            "exact_seconds": t_sdp,
            "total_seconds": total,
        },
        solver_stats=solver_stats,
        warnings=warnings_list,
        seed=opts.seed,
    )

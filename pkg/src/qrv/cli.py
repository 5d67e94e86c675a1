"""Command-line workflow.

Subcommands: ``classify``, ``verify``, ``bound`` (margin filter only),
``gen-qubit``, ``encode-image``, ``oracle-check``.

Exit codes: 0 success; 1 verification found non-robust states and
``--strict`` was given (without it this is informational and exits 0);
2 input/schema error, printed with the failing document path; 3 solver
failure (every exact verdict failed).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .classifiers import accuracy, classify
from .config import DEFAULT_POLICY, NumericPolicy
from .errors import QrvError, SchemaError, ValidationError
from . import casestudy, formats, oracle
from .verifier import VerifyOptions, under_robust_accuracy, verify_dataset

EXIT_OK = 0
EXIT_NON_ROBUST = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_FAILURE = 3


@dataclass(frozen=True)
class RunConfig:
    """Resolved verification run settings."""

    epsilons: tuple[float, ...]
    mode: str = "mixed"
    workers: int = 1
    seed: int = 0
    oracle_check: bool = False
    strict: bool = False
    omit_timings: bool = False
    report_path: str | None = None
    adversarial_path: str | None = None
    policy: NumericPolicy = field(default=DEFAULT_POLICY)

    def __post_init__(self):
        for eps in self.epsilons:
            if not 0.0 < eps < 1.0:
                raise ValidationError(f"epsilon must be in (0, 1), got {eps}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


def _sig4(x: float) -> str:
    """Report numbers carry four significant digits."""
    if x is None:
        return "-"
    if x == 0:
        return "0.000"
    return f"{x:.4g}"


def _parse_epsilons(raw: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"bad --epsilon value {raw!r}") from exc
    if not values:
        raise ValidationError("--epsilon needs at least one value")
    return values


def _load(loader, path):
    try:
        return loader(path)
    except SchemaError as exc:
        raise SchemaError(str(exc).split(": ", 1)[-1], f"{path}:{exc.path}") from exc
    except FileNotFoundError as exc:
        raise SchemaError("file not found", str(path)) from exc


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_classify(args) -> int:
    classifier = _load(formats.load_classifier, args.classifier)
    dataset = _load(formats.load_dataset, args.dataset)
    dataset.check_compatible(classifier)
    rows = []
    hits = 0
    for i, (state, label) in enumerate(dataset):
        outcome = classify(classifier, state)
        ok = outcome.label_index == label
        hits += ok
        rows.append((i, label, outcome.label_index, outcome.margin, outcome.tie, ok))
    acc = hits / len(dataset)
    print(f"accuracy: {_sig4(acc)}  ({hits}/{len(dataset)})")
    print(f"{'index':>5}  {'label':>5}  {'predicted':>9}  {'margin':>10}  tie  correct")
    for i, label, pred, margin, tie, ok in rows:
        print(
            f"{i:>5}  {classifier.labels[label]:>5}  {classifier.labels[pred]:>9}  "
            f"{_sig4(margin):>10}  {'y' if tie else 'n':>3}  {'y' if ok else 'n'}"
        )
    if args.report:
        doc = {
            "format": formats.FORMAT_TAG,
            "kind": "classification_report",
            "accuracy": acc,
            "labels": [
                {"index": i, "label": label, "predicted": pred,
                 "margin": margin, "tie": tie, "correct": ok}
                for i, label, pred, margin, tie, ok in rows
            ],
        }
        formats.write_json(args.report, doc)
    return EXIT_OK


def _oracle_cross_check(classifier, dataset, report, eps, resolution, policy):
    """Grid-oracle consistency check for the entries that needed exact
    solves.

    The grid minimum upper-bounds the exact bound, so two violations are
    possible: the grid found a class change closer than the certified
    optimum, or it exhibits a concrete adversarial example inside the
    ball for a state the verifier called robust.  A coarse grid finding
    nothing is not evidence of robustness and is never counted against
    the verifier.
    """
    grid = oracle.SearchGrid(resolution=resolution)
    checked = consistent = 0
    details = []
    for verdict in report.verdicts:
        if verdict.status != "ok" or verdict.margin_certified:
            continue
        state, label = dataset.entries[verdict.index]
        rho = state.density() if hasattr(state, "density") else state
        delta_hat, _ = oracle.bloch_grid_min_distance(
            classifier, rho, label, grid, policy=policy
        )
        checked += 1
        delta = np.inf if verdict.delta_unbounded else verdict.delta
        undershoot = delta_hat < delta - 1e-4
        missed_witness = bool(verdict.robust) and delta_hat <= eps - 1e-6
        ok = not (undershoot or missed_witness)
        consistent += ok
        details.append(
            {"index": verdict.index, "delta": verdict.delta,
             "oracle_delta_upper": None if np.isinf(delta_hat) else delta_hat,
             "consistent": ok}
        )
    return {"resolution": resolution, "checked": checked,
            "consistent": consistent, "details": details}


def _cmd_verify(args) -> int:
    config = RunConfig(
        epsilons=_parse_epsilons(args.epsilon),
        mode=args.mode,
        workers=args.workers,
        seed=args.seed,
        oracle_check=args.oracle,
        strict=args.strict,
        omit_timings=args.omit_timings,
        report_path=args.report,
        adversarial_path=args.adversarial,
    )
    classifier = _load(formats.load_classifier, args.classifier)
    dataset = _load(formats.load_dataset, args.dataset)
    dataset.check_compatible(classifier)
    if config.oracle_check and classifier.dim != 2:
        raise SchemaError("--oracle requires a dimension-2 classifier", args.classifier)

    options = VerifyOptions(
        mode=config.mode, workers=config.workers, seed=config.seed,
        policy=config.policy,
    )
    columns = []
    any_non_robust = False
    all_failed = True
    for eps in config.epsilons:
        t0 = time.perf_counter()
        ura = under_robust_accuracy(classifier, dataset, eps, policy=config.policy)
        ura_seconds = time.perf_counter() - t0
        report = verify_dataset(classifier, dataset, eps, options=options)
        exact_attempted = sum(
            1 for v in report.verdicts
            if v.status in ("ok", "solver_failure", "inconclusive")
            and not v.margin_certified and v.correct
        )
        exact_failed = report.solver_stats.get("failures", 0)
        if exact_attempted == 0 or exact_failed < exact_attempted:
            all_failed = False
        any_non_robust = any_non_robust or report.adversarial_count > 0
        doc = formats.emit_report(report, include_timings=not config.omit_timings)
        doc["under_approx_seconds"] = None if config.omit_timings else ura_seconds
        if config.oracle_check:
            doc["oracle_check"] = _oracle_cross_check(
                classifier, dataset, report, eps, args.oracle_resolution, config.policy
            )
        columns.append((eps, ura, ura_seconds, report, doc))
        for warning in report.warnings:
            print(f"warning: {warning}", file=sys.stderr)

    header = "".join(f"  eps={_sig4(eps):>10}" for eps, *_ in columns)
    print(f"{'Robust Accuracy (%)':<34}{header}")
    print(
        f"{'  margin bound (under-approx)':<34}"
        + "".join(f"  {100 * ura:>14.2f}" for _, ura, *_ in columns)
    )
    print(
        f"{'  exact verification':<34}"
        + "".join(f"  {100 * col[3].robust_accuracy:>14.2f}" for col in columns)
    )
    print("Verification time (s)")
    print(
        f"{'  margin bound (under-approx)':<34}"
        + "".join(f"  {_sig4(col[2]):>14}" for col in columns)
    )
    print(
        f"{'  exact verification':<34}"
        + "".join(f"  {_sig4(col[3].timings['total_seconds']):>14}" for col in columns)
    )
    for eps, _, _, report, doc in columns:
        extra = ""
        if config.oracle_check:
            oc = doc["oracle_check"]
            extra = f", oracle consistency {oc['consistent']}/{oc['checked']}"
        print(
            f"eps={_sig4(eps)}: {report.adversarial_count} adversarial example(s), "
            f"{report.n_states - report.n_correct} misclassified, "
            f"{report.solver_stats.get('failures', 0)} solver failure(s){extra}"
        )

    if config.report_path:
        if len(columns) == 1:
            formats.write_json(config.report_path, columns[0][4])
        else:
            formats.write_json(
                config.report_path,
                {
                    "format": formats.FORMAT_TAG,
                    "kind": "verification_report_set",
                    "runs": [doc for *_, doc in columns],
                },
            )
    if config.adversarial_path:
        sidecar_entries = []
        for *_, report, _doc in columns:
            sidecar_entries.extend(report.adversarial)
        formats.write_json(
            config.adversarial_path,
            formats.emit_adversarial_sidecar(sidecar_entries, dataset),
        )

    exact_jobs_exist = any(
        v.status in ("ok", "solver_failure", "inconclusive")
        and not v.margin_certified and v.correct
        for col in columns for v in col[3].verdicts
    )
    if exact_jobs_exist and all_failed:
        return EXIT_SOLVER_FAILURE
    if any_non_robust and config.strict:
        return EXIT_NON_ROBUST
    return EXIT_OK


def _cmd_bound(args) -> int:
    classifier = _load(formats.load_classifier, args.classifier)
    dataset = _load(formats.load_dataset, args.dataset)
    dataset.check_compatible(classifier)
    epsilons = _parse_epsilons(args.epsilon)
    rows = []
    for eps in epsilons:
        t0 = time.perf_counter()
        ura = under_robust_accuracy(classifier, dataset, eps)
        rows.append((eps, ura, time.perf_counter() - t0))
    header = "".join(f"  eps={_sig4(eps):>10}" for eps, *_ in rows)
    print(f"{'Robust Accuracy (%)':<34}{header}")
    print(
        f"{'  margin bound (under-approx)':<34}"
        + "".join(f"  {100 * ura:>14.2f}" for _, ura, _ in rows)
    )
    print(
        f"{'Time (s)':<34}" + "".join(f"  {_sig4(t):>14}" for *_, t in rows)
    )
    if args.report:
        formats.write_json(
            args.report,
            {
                "format": formats.FORMAT_TAG,
                "kind": "under_approx_report",
                "columns": [
                    {"epsilon": eps, "under_approx_robust_accuracy": ura}
                    for eps, ura, _ in rows
                ],
            },
        )
    return EXIT_OK


def _cmd_gen_qubit(args) -> int:
    classifier, train, val = casestudy.generate_qubit_case_study(
        theta_a=args.theta_a,
        theta_b=args.theta_b,
        theta_star=args.theta_star,
        n_train=args.n_train,
        n_val=args.n_val,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    prefix = args.out_prefix
    paths = {
        "classifier": f"{prefix}_classifier.json",
        "train": f"{prefix}_train.json",
        "validation": f"{prefix}_val.json",
    }
    formats.save_classifier(paths["classifier"], classifier)
    formats.save_dataset(paths["train"], train)
    formats.save_dataset(paths["validation"], val)
    print(f"classifier: {paths['classifier']}")
    print(f"train:      {paths['train']}  ({len(train)} states)")
    print(f"validation: {paths['validation']}  ({len(val)} states)")
    print(f"train accuracy:      {_sig4(accuracy(classifier, train))}")
    print(f"validation accuracy: {_sig4(accuracy(classifier, val))}")
    return EXIT_OK


def _cmd_encode_image(args) -> int:
    state = casestudy.encode_image(args.image)
    formats.save_state(args.out, state)
    print(f"encoded {args.image} -> {args.out} ({state.dim} amplitudes)")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    classifier = _load(formats.load_classifier, args.classifier)
    dataset = _load(formats.load_dataset, args.dataset)
    dataset.check_compatible(classifier)
    if classifier.dim != 2:
        raise SchemaError("oracle-check requires a dimension-2 classifier",
                          args.classifier)
    eps = _parse_epsilons(args.epsilon)
    if len(eps) != 1:
        raise ValidationError("oracle-check takes a single epsilon")
    eps = eps[0]
    options = VerifyOptions(workers=args.workers, seed=args.seed)
    report = verify_dataset(classifier, dataset, eps, options=options)
    check = _oracle_cross_check(
        classifier, dataset, report, eps, args.resolution, DEFAULT_POLICY
    )
    print(
        f"oracle cross-check at resolution {args.resolution}^3: "
        f"{check['consistent']}/{check['checked']} exact verdicts consistent "
        "(the grid minimum must never undershoot the certified bound, and a "
        "grid witness inside the ball must not contradict a robust verdict)"
    )
    for item in check["details"]:
        if not item["consistent"]:
            print(
                f"  violation at index {item['index']}: "
                f"delta={_sig4(item['delta'])} "
                f"oracle_upper={_sig4(item['oracle_delta_upper'])}"
            )
    if args.report:
        formats.write_json(
            args.report,
            {"format": formats.FORMAT_TAG, "kind": "oracle_check", **check},
        )
    return EXIT_OK if check["consistent"] == check["checked"] else EXIT_NON_ROBUST


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrv",
        description="Robustness verification of quantum classifiers "
        "against unknown noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a dataset and report accuracy")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--report", help="write a JSON classification report")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("verify", help="verify epsilon-robustness of a dataset")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--epsilon", required=True,
                   help="threshold(s) in (0,1); comma-separated for a table")
    p.add_argument("--mode", choices=["mixed", "pure"], default="mixed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check exact verdicts against the Bloch-ball grid")
    p.add_argument("--oracle-resolution", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true",
                   help="exit 1 when non-robust states are found")
    p.add_argument("--report", help="write the verification report JSON")
    p.add_argument("--adversarial",
                   help="write extracted adversarial states (dataset schema)")
    p.add_argument("--omit-timings", action="store_true",
                   help="drop wall-clock timings for byte-reproducible reports")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bound", help="margin-bound under-approximation only")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("gen-qubit", help="generate the qubit case study files")
    p.add_argument("--theta-a", type=float, default=casestudy.QUBIT_DEFAULTS["theta_a"])
    p.add_argument("--theta-b", type=float, default=casestudy.QUBIT_DEFAULTS["theta_b"])
    p.add_argument("--theta-star", type=float,
                   default=casestudy.QUBIT_DEFAULTS["theta_star"])
    p.add_argument("--n-train", type=int, default=casestudy.QUBIT_DEFAULTS["n_train"])
    p.add_argument("--n-val", type=int, default=casestudy.QUBIT_DEFAULTS["n_val"])
    p.add_argument("--noise-std", type=float,
                   default=casestudy.QUBIT_DEFAULTS["noise_std"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", default="qubit_case")
    p.set_defaults(func=_cmd_gen_qubit)

    p = sub.add_parser("encode-image", help="amplitude-encode a PGM image")
    p.add_argument("image")
    p.add_argument("--out", default="state.json")
    p.set_defaults(func=_cmd_encode_image)

    p = sub.add_parser("oracle-check",
                       help="compare exact verdicts with the Bloch-ball grid")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValidationError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except QrvError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Subcommands: fit, evidence, scan, simulate, check-lemmas,
check-assumptions, experiment laplace-error, experiment consistency.
Options can also come from a flat ``key = value`` config file passed with
--config; explicit flags win over config entries.

Exit codes: 0 success, 1 usage or parse error, 2 numeric failure,
3 lemma or assumption violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import rng
from .data import ModelIndex
from .dataio import load_dataset, parse_config_file, write_csv, write_matrix_csv, write_truth_json
from .diagnostics import (
    check_sandwich,
    estimate_hessian_lipschitz,
    estimate_spectrum_bounds,
    verify_chisq_tail_lemma,
    verify_radial_integral_lemma,
)
from .errors import (
    BudgetExceeded,
    ContractViolation,
    DimensionTooLarge,
    GlmEvidenceError,
    InvalidResponse,
    NoConvergence,
    NumericError,
    ParseError,
    PreconditionViolated,
    Separation,
    ShapeMismatch,
    SingularHessian,
)
from .evidence import log_laplace_evidence, log_mc_evidence, log_quadrature_evidence
from .experiments import (
    ExperimentConfig,
    run_consistency_experiment,
    run_laplace_error_experiment,
)
from .fit import FitOptions, fit_mle
from .modelspace import ModelPrior
from .priors import PriorSpec
from .scan import select_model
from .simgen import ScalingConfig, SimConfig, make_beta0, simulate_dataset, true_support

USAGE_ERRORS = (ParseError, ShapeMismatch, InvalidResponse, ContractViolation)
NUMERIC_ERRORS = (
    Separation,
    NoConvergence,
    SingularHessian,
    NumericError,
    BudgetExceeded,
    DimensionTooLarge,
    PreconditionViolated,
    OverflowError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_model(text: str) -> ModelIndex:
    text = text.strip()
    if not text:
        return ModelIndex(())
    try:
        return ModelIndex.of(*(int(tok) for tok in text.split(",")))
    except ValueError:
        raise ContractViolation(f"cannot parse model spec {text!r}") from None


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in str(text).split(",") if tok.strip())


class _Options:
    """Resolve each option as: explicit flag > config file entry > default."""

    _BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict[str, str] = {}
        if getattr(args, "config", None):
            self.config = parse_config_file(args.config)

    def get(self, dest: str, default=None, kind=str, keys: tuple[str, ...] = ()):
        val = getattr(self.args, dest, None)
        if val is not None:
            return val
        for key in keys or (dest.replace("_", "-"), dest):
            if key in self.config:
                raw = self.config[key]
                if kind is bool:
                    return self._BOOL[raw.strip().lower()]
                return kind(raw)
        return default

    def require(self, dest: str, kind=str, keys: tuple[str, ...] = ()):
        val = self.get(dest, default=None, kind=kind, keys=keys)
        if val is None:
            raise _UsageError(f"missing required option --{dest.replace('_', '-')}")
        return val


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load(opt: _Options):
    return load_dataset(
        opt.require("data"), opt.require("response"), opt.get("family", "logistic")
    )


def _fit_options(opt: _Options) -> FitOptions:
    return FitOptions(
        grad_tol=opt.get("grad_tol", 1e-8, float),
        max_iter=opt.get("max_iter", 100, int),
        max_coef_norm=opt.get("max_coef_norm", 40.0, float),
        step_halvings=opt.get("step_halvings", 50, int),
    )


def _prior(opt: _Options) -> PriorSpec:
    return PriorSpec(sigma=opt.get("sigma", 1.0, float, keys=("prior.sigma", "sigma")))


def _fit_payload(res) -> dict:
    return {
        "model": list(res.J.indices),
        "beta_hat": [float(v) for v in res.beta_hat],
        "loglik": res.loglik,
        "score_supnorm": res.score_supnorm,
        "iterations": res.iterations,
        "converged": res.converged,
        "hessian_at_opt": [[float(v) for v in row] for row in res.hessian_at_opt],
    }


def _estimate_payload(est) -> dict:
    out = {"model": list(est.J.indices), "log_value": est.log_value, "method": est.method}
    if est.mc_std_error is not None:
        out["mc_std_error"] = est.mc_std_error
        out["mc_draws"] = est.mc_draws
        out["seed"] = est.seed
    return out


def cmd_fit(opt: _Options) -> int:
    ds = _load(opt)
    res = fit_mle(ds, _parse_model(opt.get("model", "")), _fit_options(opt))
    _emit(_fit_payload(res))
    return 0


def cmd_evidence(opt: _Options) -> int:
    ds = _load(opt)
    J = _parse_model(opt.get("model", ""))
    prior = _prior(opt)
    method = opt.get("method", "laplace")
    if method == "laplace":
        est = log_laplace_evidence(ds, J, prior, fit_mle(ds, J, _fit_options(opt)))
        _emit(_estimate_payload(est))
    elif method == "quad":
        est = log_quadrature_evidence(
            ds, J, prior, fit_mle(ds, J, _fit_options(opt)),
            half_width_sds=opt.get("half_width", 12.0, float),
            points_per_dim=opt.get("points_per_dim", 400, int),
        )
        _emit(_estimate_payload(est))
    elif method == "mc":
        B = opt.get("B", 50000, int, keys=("B", "b"))
        seed = opt.get("seed", 0, int)
        reps = opt.get("mc_replicates", 1, int)
        if reps <= 1:
            _emit(_estimate_payload(log_mc_evidence(ds, J, prior, B, seed)))
        else:
            ests = [
                log_mc_evidence(ds, J, prior, B, rng.mix64(seed, r)) for r in range(reps)
            ]
            vals = [e.log_value for e in ests]
            _emit({
                "estimates": [_estimate_payload(e) for e in ests],
                "max_abs_diff": max(vals) - min(vals),
            })
    else:
        raise _UsageError(f"unknown evidence method {method!r}")
    return 0


def cmd_scan(opt: _Options) -> int:
    ds = _load(opt)
    prior = _prior(opt)
    q = opt.require("q", int)
    mp = ModelPrior(gamma=opt.get("gamma", 1.0, float), q_max=q, p=ds.p)
    method = opt.get("method", "laplace")
    result = select_model(
        ds, prior, mp,
        method=method,
        B=opt.get("B", 50000, int, keys=("B", "b")),
        seed=opt.get("seed", 0, int),
        budget=opt.get("budget", 10**6, int),
        fit_options=_fit_options(opt),
    )
    out = opt.get("out")
    if out:
        write_csv(
            out,
            ("model", "size", "log_score", "status"),
            [(J.label(), J.size, sc, st) for J, sc, st in result.scores],
        )
    _emit({
        "best": list(result.best.indices),
        "score_kind": result.score_kind,
        "models_scored": result.models_scored,
        "separated": result.separated_count,
        "failed": result.failed_count,
        "out": out,
    })
    return 0


def cmd_simulate(opt: _Options) -> int:
    cfg = SimConfig(
        n=opt.require("n", int),
        p=opt.require("p", int),
        q_true=opt.get("q_true", 2, int),
        amplitude=opt.get("amplitude", 2.0, float),
        family=opt.get("family", "logistic"),
        seed=opt.get("seed", 0, int),
    )
    out_dir = Path(opt.get("out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    ds, beta0, J0 = simulate_dataset(cfg)
    write_matrix_csv(out_dir / "design.csv", ds.X)
    write_matrix_csv(out_dir / "response.csv", ds.Y[:, None])
    write_truth_json(
        out_dir / "truth.json", beta0, J0.indices, cfg.seed,
        {"n": cfg.n, "p": cfg.p, "q_true": cfg.q_true, "amplitude": cfg.amplitude,
         "family": cfg.family},
    )
    _emit({"out": str(out_dir), "n": cfg.n, "p": cfg.p, "J0": list(J0.indices)})
    return 0


def cmd_check_lemmas(opt: _Options) -> int:
    chisq = verify_chisq_tail_lemma()
    radial = verify_radial_integral_lemma()
    payload = {
        r.lemma: {
            "cases": len(r.grid),
            "violations": r.violations,
            "worst_margin": r.worst_margin,
        }
        for r in (chisq, radial)
    }
    _emit(payload)
    return 3 if (chisq.violations or radial.violations) else 0


def _sample_models(p: int, q2: int, count: int, seed: int) -> list[ModelIndex]:
    """Deterministic sample of nonempty models with |J| <= q2."""
    out = []
    pos = 0
    while len(out) < count:
        u = rng.uniforms(seed, pos, q2 + 1)
        pos += q2 + 1
        size = 1 + int(u[0] * q2)
        cols = sorted({1 + int(v * p) for v in u[1 : 1 + size]})
        out.append(ModelIndex(tuple(min(c, p) for c in cols)))
    return out


def cmd_check_assumptions(opt: _Options) -> int:
    ds = _load(opt)
    q = opt.require("q", int)
    radius = opt.get("radius", 3.0, float)
    draws = opt.get("draws", 20, int)
    seed = opt.get("seed", 0, int)
    count = opt.get("models_sample", 50, int)
    models = _sample_models(ds.p, min(2 * q, ds.p), count, rng.mix64(seed, 1))
    c_lo, c_hi = estimate_spectrum_bounds(ds, models, radius, draws, rng.mix64(seed, 2))
    lip = estimate_hessian_lipschitz(ds, models, radius, draws, rng.mix64(seed, 3))

    a0_norm = None
    sandwich_ok = None
    epsilon = None
    truth_path = opt.get("truth")
    if truth_path:
        with open(truth_path, "r", encoding="utf-8") as fh:
            truth = json.load(fh)
        beta0_full = np.asarray(truth["beta0"], dtype=np.float64)
        support = [int(j) for j in truth["J0"]]
        a0_norm = float(np.linalg.norm(beta0_full))
        epsilon = opt.get("epsilon", 0.2, float)
        delta = opt.get("delta", None, float)
        if delta is None:
            delta = epsilon * c_lo / lip.c_change_hat if lip.c_change_hat > 0 else radius
        extras = [j for j in range(1, ds.p + 1) if j not in support]
        J = ModelIndex(tuple(sorted(support + extras[: max(0, 2 * q - len(support))])))
        beta0_in_J = np.array([beta0_full[j - 1] for j in J.indices])
        sandwich_ok = check_sandwich(
            ds, J, beta0_in_J, delta, epsilon, draws, rng.mix64(seed, 4)
        )
    _emit({
        "a0_norm": a0_norm,
        "c_lower_hat": c_lo,
        "c_upper_hat": c_hi,
        "c_change_hat": lip.c_change_hat,
        "models_sampled": len(models),
        "betas_sampled": len(models) * draws,
        "radius": radius,
        "sandwich_ok": sandwich_ok,
        "sandwich_epsilon": epsilon,
    })
    return 3 if sandwich_ok is False else 0


def _experiment_config(opt: _Options, experiment: str) -> ExperimentConfig:
    scaling = None
    if experiment == "consistency":
        scaling = ScalingConfig(
            kappa=opt.get("kappa", 0.6, float),
            psi=opt.get("psi", 0.0, float),
            phi=opt.get("phi", 0.0, float),
            gamma=opt.get("gamma", 1.0, float),
        )
    return ExperimentConfig(
        experiment=experiment,
        n_values=_parse_int_list(opt.require("n_values", keys=("n-values", "n_values"))),
        replicates=opt.get("replicates", 20, int),
        B=opt.get("B", 20000, int, keys=("B", "b")),
        master_seed=opt.get("seed", 0, int),
        out_path=opt.get("out", "."),
        gamma=opt.get("gamma", 1.0, float),
        q_values=_parse_int_list(opt.get("q_values", "1,2", keys=("q-values", "q_values"))),
        scaling=scaling,
        workers=opt.get("workers", 1, int),
        p_override=opt.get("p_override", None, int),
        sigma=opt.get("sigma", 1.0, float, keys=("prior.sigma", "sigma")),
        j0_size=opt.get("j0_size", 2, int),
        method=opt.get("method", "laplace"),
        budget=opt.get("budget", 10**6, int),
        svg=bool(opt.get("svg", False, bool)),
    )


def cmd_experiment(opt: _Options) -> int:
    which = opt.args.which.replace("-", "_")
    cfg = _experiment_config(opt, which)
    if which == "laplace_error":
        rows, agg = run_laplace_error_experiment(cfg)
        _emit({
            "rows": len(rows),
            "out": str(Path(cfg.out_path) / "laplace_error.csv"),
            "figure": str(Path(cfg.out_path) / "figure1.csv"),
            "aggregate": [
                {"n": n, "q": q, "mean_error": m, "se_error": s} for n, q, m, s in agg
            ],
        })
    else:
        rows, agg = run_consistency_experiment(cfg)
        _emit({
            "rows": len(rows),
            "out": str(Path(cfg.out_path) / "consistency.csv"),
            "aggregate": [
                {"n": n, "p": p, "q": q, "beta_min": b, "replicates": r, "recovery_rate": rr}
                for n, p, q, b, r, rr in agg
            ],
        })
    return 0


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out")


def _add_data_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--data", help="design matrix CSV (headerless)")
    sp.add_argument("--response", help="response CSV (one value per row)")
    sp.add_argument("--family", choices=["logistic", "poisson"])


def _add_fit_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--grad-tol", dest="grad_tol", type=float)
    sp.add_argument("--max-iter", dest="max_iter", type=int)
    sp.add_argument("--max-coef-norm", dest="max_coef_norm", type=float)
    sp.add_argument("--step-halvings", dest="step_halvings", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="glmevidence", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", help="Newton MLE of one submodel, printed as JSON")
    _add_common(sp); _add_data_args(sp); _add_fit_args(sp)
    sp.add_argument("--model", help="comma-separated 1-based indices, empty for the null model")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("evidence", help="one log-evidence estimate, printed as JSON")
    _add_common(sp); _add_data_args(sp); _add_fit_args(sp)
    sp.add_argument("--model")
    sp.add_argument("--method", choices=["laplace", "mc", "quad"])
    sp.add_argument("--B", dest="B", type=int)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--mc-replicates", dest="mc_replicates", type=int)
    sp.add_argument("--half-width", dest="half_width", type=float)
    sp.add_argument("--points-per-dim", dest="points_per_dim", type=int)
    sp.set_defaults(func=cmd_evidence)

    sp = sub.add_parser("scan", help="score every q-sparse model, write scores.csv")
    _add_common(sp); _add_data_args(sp); _add_fit_args(sp)
    sp.add_argument("--q", type=int)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--method", choices=["laplace", "bayes"])
    sp.add_argument("--B", dest="B", type=int)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--sigma", type=float)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("simulate", help="emit design.csv, response.csv and truth.json")
    _add_common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--q-true", dest="q_true", type=int)
    sp.add_argument("--amplitude", type=float)
    sp.add_argument("--family", choices=["logistic", "poisson"])
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("check-lemmas", help="verify the two tail inequalities on their grids")
    _add_common(sp)
    sp.set_defaults(func=cmd_check_lemmas)

    sp = sub.add_parser("check-assumptions", help="sampled regularity diagnostics on a dataset")
    _add_common(sp); _add_data_args(sp)
    sp.add_argument("--q", type=int)
    sp.add_argument("--radius", type=float)
    sp.add_argument("--draws", type=int)
    sp.add_argument("--models-sample", dest="models_sample", type=int)
    sp.add_argument("--truth", help="truth.json from simulate, enables the sandwich check")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--delta", type=float)
    sp.set_defaults(func=cmd_check_assumptions)

    sp = sub.add_parser("experiment", help="run the paper-scale experiment harness")
    sp.add_argument("which", choices=["laplace-error", "consistency"])
    _add_common(sp)
    sp.add_argument("--n-values", dest="n_values")
    sp.add_argument("--q-values", dest="q_values")
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--B", dest="B", type=int)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--psi", type=float)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--j0-size", dest="j0_size", type=int)
    sp.add_argument("--p-override", dest="p_override", type=int)
    sp.add_argument("--method", choices=["laplace", "bayes"])
    sp.add_argument("--budget", type=int)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--svg", action="store_const", const=True)
    sp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opt = _Options(args)
        return args.func(opt)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except GlmEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

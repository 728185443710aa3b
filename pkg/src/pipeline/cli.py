"""
Command-line interface: ``varselect <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data or numerical error.
"""

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from src import __version__
from src.components.coeff_search import compare_with_ols, run_coefficient_search
from src.components.config_search import run_search
from src.components.data_ingestion import load_csv, write_csv
from src.components.forecasting import forecast
from src.components.ols_estimator import fit, unflatten_coefficients
from src.components.report_writer import save_report, write_report
from src.components.synthesis import COEFFICIENT_STREAM, generate, random_stable_coefficients, spectral_radius
from src.config.configuration import DEFAULT_CONFIG_PATH, Configuration
from src.exception.exception import CustomException
from src.logging.logger import configure_file_logging, logger
from src.models.run_config import DEFAULT_SEED, RunConfig
from src.models.search_types import (
    CoefficientSearchParams,
    CoefficientSearchResult,
    GAParams,
    GraspParams,
    HybridParams,
    PartitionMode,
    ScatterParams,
    SearchBudget,
    SearchMethod,
    SearchSpace,
    TabuParams,
)
from src.models.var_types import (
    CriterionKind,
    ForecastResult,
    GeneratorSpec,
    ModelConfig,
    SimulationResult,
    TimeSeriesDataset,
)
from src.utils.seeding import stream_rng

SUBCOMMANDS = ("fit", "select", "search-coeffs", "compare", "simulate", "forecast")

METHOD_PARAMS = {
    SearchMethod.GA: ("ga", GAParams),
    SearchMethod.TABU: ("tabu", TabuParams),
    SearchMethod.GRASP: ("grasp", GraspParams),
    SearchMethod.SCATTER: ("scatter", ScatterParams),
    SearchMethod.HYBRID: ("hybrid", HybridParams),
}


class UsageError(Exception):
    """Bad flags or flag combinations; mapped to exit code 1."""

    def __init__(self, message: str, usage: str = ""):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _params_from_section(configuration: Configuration, section: str, params_type):
    names = {f.name for f in dataclasses.fields(params_type)}
    values = {k: v for k, v in configuration.get_section(section).items() if k in names}
    return params_type(**values)


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG_PATH, help="YAML configuration file")
    common.add_argument("--seed", type=_nonnegative_int, default=DEFAULT_SEED, help="master seed")
    common.add_argument("--out", default=None, help="human report path (default: standard output)")
    common.add_argument("--out-json", default=None, help="machine (JSON) report path")

    data = _Parser(add_help=False)
    data.add_argument("--input", required=True, help="CSV file with a header row")
    data.add_argument("--dependent", action="append", default=None, help="dependent column (repeatable)")
    data.add_argument("--independent", action="append", default=None, help="independent column (repeatable)")
    data.add_argument("--no-constant", action="store_true", help="omit the constant term")

    fixed = _Parser(add_help=False)
    fixed.add_argument("--p", type=_positive_int, default=1, help="lag order of dependent variables")
    fixed.add_argument("--q", type=_nonnegative_int, default=0, help="lag order of independent variables")

    criterion = _Parser(add_help=False)
    criterion.add_argument("--criterion", choices=[k.value for k in CriterionKind], default="bic")

    search = _Parser(add_help=False)
    search.add_argument("--budget", type=_positive_int, default=None, help="maximum distinct evaluations")
    search.add_argument("--stagnation", type=_positive_int, default=None, help="new evaluations without improvement")
    search.add_argument("--workers", type=_positive_int, default=1, help="parallel candidate evaluations")

    parser = _Parser(prog="varselect", description="VAR estimation, model selection and coefficient search")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}", parser_class=_Parser)
    sub.required = True

    sub.add_parser("fit", parents=[common, data, fixed, criterion], help="OLS fit of one configuration")

    select = sub.add_parser("select", parents=[common, data, criterion, search], help="configuration search")
    select.add_argument("--method", choices=[m.value for m in SearchMethod], default="exhaustive")
    select.add_argument("--p-max", type=_positive_int, default=4)
    select.add_argument("--q-max", type=_nonnegative_int, default=0)
    select.add_argument("--search-partition", action="store_true",
                        help="also search the dependent/independent split")

    coefficient_methods = [m.value for m in SearchMethod if m is not SearchMethod.EXHAUSTIVE]
    for name, help_text in (("search-coeffs", "metaheuristic search over coefficients"),
                            ("compare", "coefficient search compared with OLS")):
        command = sub.add_parser(name, parents=[common, data, fixed, criterion, search], help=help_text)
        command.add_argument("--method", choices=coefficient_methods, default="ga")
        command.add_argument("--warm-start", action="store_true",
                             help="include the OLS solution among the initial solutions")

    simulate = sub.add_parser("simulate", parents=[common], help="generate a synthetic VAR dataset")
    simulate.add_argument("--out-csv", required=True, help="CSV path of the generated data")
    simulate.add_argument("--n", type=_positive_int, default=None, help="dependent variables")
    simulate.add_argument("--n-exog", type=_nonnegative_int, default=None, help="independent variables")
    simulate.add_argument("--true-p", type=_positive_int, default=None)
    simulate.add_argument("--true-q", type=_nonnegative_int, default=None)
    simulate.add_argument("--T", dest="T", type=_positive_int, default=None, help="rows after burn-in")
    simulate.add_argument("--noise", type=float, default=None, help="innovation standard deviation")
    simulate.add_argument("--burn-in", type=_nonnegative_int, default=None)
    simulate.add_argument("--exogenous", choices=["none", "random_walk"], default=None)
    simulate.add_argument("--radius", type=float, default=None, help="target companion spectral radius")
    simulate.add_argument("--no-constant", action="store_true")

    forecast_cmd = sub.add_parser("forecast", parents=[common, data, fixed], help="iterated OLS forecast")
    forecast_cmd.add_argument("--horizon", type=_positive_int, required=True)
    forecast_cmd.add_argument("--future-z", default=None,
                              help="CSV with future values of the independent columns")
    return parser


class CommandRunner:
    """Executes one parsed subcommand and emits its reports."""

    def __init__(self, args: argparse.Namespace, configuration: Configuration):
        self.args = args
        self.config = configuration
        self.prefer = configuration.get_value("parallel", "prefer", "threads")

    # ------------------------------------------------------------------ helpers

    def _dataset(self) -> TimeSeriesDataset:
        return load_csv(self.args.input, self.args.dependent, self.args.independent)

    def _fixed_config(self, ds: TimeSeriesDataset) -> ModelConfig:
        return ModelConfig(self.args.p, self.args.q, ds.default_mask, not self.args.no_constant)

    def _budget(self) -> SearchBudget:
        section = self.config.get_section("budget")
        return SearchBudget(
            max_evaluations=self.args.budget or section.get("max_evaluations", 1000),
            stagnation_limit=self.args.stagnation or section.get("stagnation_limit", 200),
            master_seed=self.args.seed,
        )

    def _method_params(self, method: SearchMethod):
        if method not in METHOD_PARAMS:
            return None
        section, params_type = METHOD_PARAMS[method]
        return _params_from_section(self.config, section, params_type)

    def _coefficient_params(self) -> CoefficientSearchParams:
        params = _params_from_section(self.config, "coefficient_search", CoefficientSearchParams)
        if self.args.warm_start:
            params = dataclasses.replace(params, include_ols=True)
        return params

    def _run_config(self, **overrides) -> RunConfig:
        args = self.args
        fields = {
            "command": args.command,
            "seed": args.seed,
            "out": args.out,
            "out_json": args.out_json,
        }
        for name in ("input", "criterion", "method", "p_max", "q_max", "p", "q", "horizon",
                     "future_z", "warm_start", "workers"):
            if getattr(args, name, None) is not None:
                fields[name] = getattr(args, name)
        for name in ("dependent", "independent"):
            if getattr(args, name, None):
                fields[name] = tuple(getattr(args, name))
        if hasattr(args, "no_constant"):
            fields["include_constant"] = not args.no_constant
        if getattr(args, "search_partition", False):
            fields["partition_mode"] = PartitionMode.SEARCH.value
        fields.update(overrides)
        return RunConfig(**fields)

    def _emit(self, result, run_config: RunConfig, names: Optional[Sequence[str]] = None) -> None:
        schema_file = self.config.get_value("report", "schema_file")
        kwargs = {}
        if schema_file:
            path = Path(schema_file)
            if not path.is_absolute():
                path = Path(self.config.config_file_path).resolve().parents[1] / path
            kwargs["schema_file"] = str(path)
        save_report(write_report(result, "human", run_config, names, **kwargs), self.args.out)
        if self.args.out_json:
            save_report(write_report(result, "machine", run_config, names, **kwargs), self.args.out_json)

    # ------------------------------------------------------------------ commands

    def fit(self) -> None:
        ds = self._dataset()
        result = fit(ds, self._fixed_config(ds))
        self._emit(result, self._run_config(), ds.names)

    def select(self) -> None:
        ds = self._dataset()
        method = SearchMethod(self.args.method)
        space = SearchSpace(
            p_max=self.args.p_max,
            q_max=self.args.q_max,
            partition_mode=PartitionMode.SEARCH if self.args.search_partition else PartitionMode.FIXED,
            include_constant=not self.args.no_constant,
        )
        budget = self._budget()
        params = self._method_params(method)
        result = run_search(method, ds, space, CriterionKind(self.args.criterion), budget, params,
                            self.args.workers, self.prefer)
        run_config = self._run_config(
            max_evaluations=budget.max_evaluations,
            stagnation_limit=budget.stagnation_limit,
            method_params=dataclasses.asdict(params) if params is not None else {},
        )
        self._emit(result, run_config, ds.names)

    def _coefficient_run(self):
        ds = self._dataset()
        method = SearchMethod(self.args.method)
        budget = self._budget()
        params = self._method_params(method)
        coeff_params = self._coefficient_params()
        run_config = self._run_config(
            max_evaluations=budget.max_evaluations,
            stagnation_limit=budget.stagnation_limit,
            method_params={**dataclasses.asdict(params), "coefficient_search": dataclasses.asdict(coeff_params)},
        )
        return ds, method, budget, params, coeff_params, run_config

    def search_coeffs(self) -> None:
        ds, method, budget, params, coeff_params, run_config = self._coefficient_run()
        cfg = self._fixed_config(ds)
        kind = CriterionKind(self.args.criterion)
        engine, _ = run_coefficient_search(ds, cfg, kind, method, budget, params, coeff_params,
                                           self.args.workers, self.prefer)
        result = CoefficientSearchResult(
            config=cfg,
            criterion=kind,
            method=method,
            coefficients=unflatten_coefficients(engine.best_solution, cfg, ds),
            best_value=engine.best_value,
            evaluations_used=engine.evaluations_used,
            trajectory=tuple(engine.trajectory),
            stop_reason=engine.stop_reason,
        )
        self._emit(result, run_config, ds.names)

    def compare(self) -> None:
        ds, method, budget, params, coeff_params, run_config = self._coefficient_run()
        report = compare_with_ols(ds, self._fixed_config(ds), CriterionKind(self.args.criterion), method,
                                  budget, params, coeff_params, self.args.workers, self.prefer)
        self._emit(report, run_config, ds.names)

    def simulate(self) -> None:
        defaults = self.config.get_section("generator")
        args = self.args

        def pick(name: str, fallback):
            value = getattr(args, name)
            return value if value is not None else defaults.get(name, fallback)

        n, n_exog = pick("n", 2), pick("n_exog", 0)
        true_p, true_q = pick("true_p", 2), pick("true_q", 0)
        exogenous = args.exogenous or ("random_walk" if n_exog else "none")
        if true_q and not n_exog:
            raise UsageError("--true-q > 0 needs --n-exog > 0")
        if n_exog and exogenous == "none":
            raise UsageError("--n-exog > 0 needs an exogenous process")

        coeffs = random_stable_coefficients(
            stream_rng(args.seed, COEFFICIENT_STREAM), n, true_p, d=n_exog, q=true_q,
            include_constant=not args.no_constant, target_radius=pick("radius", 0.8),
        )
        spec = GeneratorSpec(
            true_coefficients=coeffs,
            noise_scale=pick("noise", 1.0),
            exogenous=exogenous,
            T=pick("T", 500),
            burn_in=pick("burn_in", 100),
            seed=args.seed,
            n_exogenous=n_exog,
        )
        ds = generate(spec)
        write_csv(ds, args.out_csv)
        generator = {
            "n": n, "n_exog": n_exog, "true_p": true_p, "true_q": true_q, "T": spec.T,
            "noise": spec.noise_scale, "burn_in": spec.burn_in, "exogenous": exogenous,
            "radius": pick("radius", 0.8), "include_constant": not args.no_constant,
        }
        result = SimulationResult(ds, spec, spectral_radius(coeffs), args.out_csv)
        self._emit(result, self._run_config(generator=generator), ds.names)

    def forecast(self) -> None:
        ds = self._dataset()
        result = fit(ds, self._fixed_config(ds))
        future_z = None
        cfg = result.config
        if self.args.future_z:
            future = load_csv(self.args.future_z)
            columns = [future.column_index(ds.names[i]) for i in cfg.independent_indices]
            future_z = future.observations[:, columns]
        predictions = forecast(ds, result, self.args.horizon, future_z)
        names = tuple(ds.names[i] for i in cfg.dependent_indices)
        self._emit(ForecastResult(result, self.args.horizon, np.asarray(predictions), names),
                   self._run_config(), ds.names)

    def run(self) -> None:
        handler = getattr(self, self.args.command.replace("-", "_"))
        logger.info(f"varselect {__version__}: {self.args.command}")
        handler()


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and run the subcommand.

    Returns:
        int: 0 on success, 1 on a usage error, 2 on a data or numerical error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configuration = Configuration(args.config)
        if configuration.get_value("logging", "file_logging", False):
            log_path = configure_file_logging(
                configuration.get_value("logging", "log_dir", "logs"),
                configuration.get_value("logging", "level", "INFO"),
            )
            logger.info(f"logging to {log_path}")
        CommandRunner(args, configuration).run()
        return 0
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except UsageError as e:
        sys.stderr.write(e.usage or parser.format_usage())
        sys.stderr.write(f"varselect: error: {e}\n")
        return 1
    except ValueError as e:
        sys.stderr.write(f"varselect: error: {e}\n")
        return 1
    except CustomException as e:
        logger.error(str(e))
        sys.stderr.write(f"varselect: {e}\n")
        return 2


def main() -> None:
    sys.exit(cli_main())

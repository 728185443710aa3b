import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src import __version__
from src.exception.exception import CustomException
from src.logging.logger import logger
from src.models.run_config import RunConfig
from src.models.search_types import CoefficientSearchResult, ComparisonReport, SearchResult
from src.models.var_types import (
    CoefficientSet,
    CriterionKind,
    FitResult,
    ForecastResult,
    ModelConfig,
    SimulationResult,
)
from src.utils.utils import dump_json_bytes, read_yaml_file, write_bytes_file

SCHEMA_PATH = str(Path(__file__).resolve().parents[2] / "config" / "schema.yaml")
SCHEMA_VERSION = 1
FORMATS = ("human", "machine")
RULE = "=" * 64

Reportable = Union[FitResult, SearchResult, ComparisonReport, CoefficientSearchResult,
                   SimulationResult, ForecastResult]


def _num(value: float) -> str:
    """Six significant digits, trailing zeros kept."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:#.6g}"


def _config_dict(cfg: ModelConfig, names: Optional[Sequence[str]]) -> dict:
    data = cfg.to_dict()
    if names is not None:
        data["dependent"] = [names[i] for i in cfg.dependent_indices]
        data["independent"] = [names[i] for i in cfg.independent_indices]
    return data


def _criteria_dict(values: Dict[CriterionKind, float]) -> dict:
    return {kind.label: values[kind] for kind in CriterionKind if kind in values}


class ReportWriter:
    """
    Renders results as a fixed-layout text table or as a JSON document whose
    fields are checked against config/schema.yaml.
    """

    def __init__(self, schema_file: str = SCHEMA_PATH, names: Optional[Sequence[str]] = None):
        try:
            self._schema_config = read_yaml_file(schema_file)
            self.names = tuple(names) if names is not None else None
        except Exception as e:
            raise CustomException(e, sys)

    # ------------------------------------------------------------------ payloads

    def _fit_payload(self, fit: FitResult) -> dict:
        return {
            "config": _config_dict(fit.config, self.names),
            "coefficients": fit.coefficients.to_dict(),
            "sigma": fit.sigma,
            "criteria": _criteria_dict(fit.criterion_values),
            "n_params": fit.n_params,
            "effective_T": fit.effective_T,
            "row_start": fit.row_start,
            "degenerate": fit.degenerate,
        }

    def _payload(self, result: Reportable):
        if isinstance(result, FitResult):
            return "fit", self._fit_payload(result)
        if isinstance(result, SearchResult):
            return "selection", {
                "method": result.method.value,
                "criterion": result.criterion.label,
                "best_config": _config_dict(result.best_config, self.names),
                "best_value": result.best_value,
                "evaluations_used": result.evaluations_used,
                "skipped_invalid": result.skipped_invalid,
                "stop_reason": result.stop_reason,
                "space": result.space.to_dict() if result.space is not None else None,
                "fit": self._fit_payload(result.best_fit),
                "trajectory": [list(point) for point in result.trajectory],
                "candidates": list(result.candidate_log),
                "extras": result.extras,
            }
        if isinstance(result, CoefficientSearchResult):
            return "coefficient_search", {
                "config": _config_dict(result.config, self.names),
                "criterion": result.criterion.label,
                "method": result.method.value,
                "best_value": result.best_value,
                "evaluations_used": result.evaluations_used,
                "stop_reason": result.stop_reason,
                "coefficients": result.coefficients.to_dict(),
                "trajectory": [list(point) for point in result.trajectory],
            }
        if isinstance(result, ComparisonReport):
            return "comparison", {
                "config": _config_dict(result.config, self.names),
                "criterion": result.criterion.label,
                "method": result.method.value,
                "ols_value": result.ols_value,
                "search_value": result.search_value,
                "gap": result.gap,
                "coefficient_distance": result.coefficient_distance,
                "evaluations_used": result.evaluations_used,
                "degenerate": result.degenerate,
                "per_criterion": result.per_criterion,
                "ols_coefficients": result.ols_coefficients.to_dict(),
                "search_coefficients": result.search_coefficients.to_dict(),
                "trajectory": [list(point) for point in result.trajectory],
            }
        if isinstance(result, SimulationResult):
            spec, ds = result.spec, result.dataset
            return "simulation", {
                "T": ds.T,
                "columns": [{"name": n, "role": r.value} for n, r in zip(ds.names, ds.roles)],
                "noise_scale": spec.noise_scale,
                "burn_in": spec.burn_in,
                "exogenous": spec.exogenous,
                "seed": spec.seed,
                "spectral_radius": result.spectral_radius,
                "true_coefficients": spec.true_coefficients.to_dict(),
            }
        if isinstance(result, ForecastResult):
            return "forecast", {
                "config": _config_dict(result.fit.config, self.names),
                "horizon": result.horizon,
                "names": list(result.names),
                "predictions": result.predictions,
                "coefficients": result.fit.coefficients.to_dict(),
            }
        raise CustomException(f"cannot report a {type(result).__name__}", sys)

    def validate_document(self, kind: str, payload: dict) -> bool:
        """
        Check that the payload carries exactly the fields documented for its kind.
        """
        required = set(self._schema_config["kinds"][kind])
        actual = set(payload)
        if required != actual:
            missing, extra = sorted(required - actual), sorted(actual - required)
            error_message = f"{kind} report does not match its schema: missing {missing}, undocumented {extra}"
            logger.error(error_message)
            raise CustomException(error_message, sys)
        return True

    # ------------------------------------------------------------------ formats

    def machine(self, result: Reportable, run_config: Optional[RunConfig] = None) -> bytes:
        kind, payload = self._payload(result)
        self.validate_document(kind, payload)
        document = {
            "schema_version": self._schema_config.get("schema_version", SCHEMA_VERSION),
            "kind": kind,
            "version": __version__,
            "run_config": run_config.to_dict() if run_config is not None else None,
            "payload": payload,
        }
        return dump_json_bytes(document)

    def human(self, result: Reportable, run_config: Optional[RunConfig] = None) -> bytes:
        kind, _ = self._payload(result)
        lines = [f"varselect {__version__} {kind} report", RULE]
        seed = run_config.seed if run_config is not None else None
        if isinstance(result, SimulationResult):
            seed = result.spec.seed
        lines.append(self._row("seed", seed if seed is not None else "-"))
        lines.extend(getattr(self, f"_human_{kind}")(result))
        if run_config is not None:
            lines += ["", "Run configuration", "-" * 17]
            for key, value in run_config.to_dict().items():
                lines.append(self._row(key, value))
        return ("\n".join(lines) + "\n").encode("utf-8")

    @staticmethod
    def _row(label: str, value) -> str:
        if isinstance(value, float):
            value = _num(value)
        return f"{label:<22}: {value}"

    def _config_lines(self, cfg: ModelConfig) -> List[str]:
        data = _config_dict(cfg, self.names)
        dependent = ",".join(data.get("dependent", [])) or "-"
        independent = ",".join(data.get("independent", [])) or "-"
        return [
            "",
            "Configuration",
            "-" * 13,
            self._row("p", cfg.p),
            self._row("q", cfg.q),
            self._row("constant", "yes" if cfg.include_constant else "no"),
            self._row("dependent", dependent),
            self._row("independent", independent),
        ]

    def _criteria_lines(self, values: Dict[CriterionKind, float]) -> List[str]:
        lines = ["", "Criteria", "-" * 8]
        for kind in CriterionKind:
            lines.append(self._row(kind.label, _num(values[kind]) if kind in values else "undefined"))
        return lines

    @staticmethod
    def _matrix_lines(label: str, matrix: np.ndarray) -> List[str]:
        matrix = np.atleast_2d(matrix)
        if matrix.size == 1:
            return [f"  {label} = {_num(matrix[0, 0])}"]
        lines = [f"  {label} ="]
        for row in matrix:
            lines.append("    [" + " ".join(f"{_num(v):>13}" for v in row) + " ]")
        return lines

    def _coefficient_lines(self, coeffs: CoefficientSet, title: str = "Coefficients") -> List[str]:
        lines = ["", title, "-" * len(title)]
        for t, A in enumerate(coeffs.A, start=1):
            lines += self._matrix_lines(f"A_{t}", A)
        for t, B in enumerate(coeffs.B, start=1):
            lines += self._matrix_lines(f"B_{t}", B)
        if coeffs.C is not None:
            lines += self._matrix_lines("C", coeffs.C)
        return lines

    def _human_fit(self, fit: FitResult) -> List[str]:
        lines = self._config_lines(fit.config)
        lines += self._criteria_lines(fit.criterion_values)
        lines += [
            self._row("n_params", fit.n_params),
            self._row("effective_T", fit.effective_T),
            self._row("degenerate", "yes" if fit.degenerate else "no"),
        ]
        lines += self._coefficient_lines(fit.coefficients)
        lines += ["", "Residual covariance", "-" * 19] + self._matrix_lines("Sigma", fit.sigma)
        return lines

    def _human_selection(self, result: SearchResult) -> List[str]:
        lines = [
            self._row("method", result.method.value),
            self._row("criterion", result.criterion.label),
            self._row("best value", _num(result.best_value)),
            self._row("evaluations used", result.evaluations_used),
            self._row("skipped invalid", result.skipped_invalid),
            self._row("stop reason", result.stop_reason or "-"),
        ]
        return lines + self._human_fit(result.best_fit)

    def _human_coefficient_search(self, result: CoefficientSearchResult) -> List[str]:
        lines = [
            self._row("method", result.method.value),
            self._row("criterion", result.criterion.label),
            self._row("best value", _num(result.best_value)),
            self._row("evaluations used", result.evaluations_used),
            self._row("stop reason", result.stop_reason or "-"),
        ]
        return lines + self._config_lines(result.config) + self._coefficient_lines(result.coefficients)

    def _human_comparison(self, result: ComparisonReport) -> List[str]:
        lines = [
            self._row("method", result.method.value),
            self._row("criterion", result.criterion.label),
            self._row("OLS value", _num(result.ols_value)),
            self._row("search value", _num(result.search_value)),
            self._row("gap", _num(result.gap)),
            self._row("coefficient distance", _num(result.coefficient_distance)),
            self._row("evaluations used", result.evaluations_used),
            self._row("degenerate", "yes" if result.degenerate else "no"),
        ]
        lines += self._config_lines(result.config)
        lines += ["", "Criteria (OLS / search / gap)", "-" * 29]
        for label, entry in result.per_criterion.items():
            lines.append(self._row(label, f"{_num(entry['ols'])} / {_num(entry['search'])} / {_num(entry['gap'])}"))
        lines += self._coefficient_lines(result.ols_coefficients, "OLS coefficients")
        lines += self._coefficient_lines(result.search_coefficients, "Searched coefficients")
        return lines

    def _human_simulation(self, result: SimulationResult) -> List[str]:
        spec, ds = result.spec, result.dataset
        lines = [
            self._row("T", ds.T),
            self._row("columns", ",".join(f"{n}:{r.value}" for n, r in zip(ds.names, ds.roles))),
            self._row("noise scale", _num(spec.noise_scale)),
            self._row("burn-in", spec.burn_in),
            self._row("exogenous", spec.exogenous),
            self._row("spectral radius", _num(result.spectral_radius)),
        ]
        if result.csv_path:
            lines.append(self._row("data", result.csv_path))
        return lines + self._coefficient_lines(spec.true_coefficients, "True coefficients")

    def _human_forecast(self, result: ForecastResult) -> List[str]:
        lines = self._config_lines(result.fit.config)
        lines += ["", "Forecast", "-" * 8]
        lines.append(f"{'h':>4} " + " ".join(f"{name:>13}" for name in result.names))
        for h, row in enumerate(result.predictions, start=1):
            lines.append(f"{h:>4} " + " ".join(f"{_num(v):>13}" for v in row))
        return lines + self._coefficient_lines(result.fit.coefficients)


def write_report(result: Reportable, fmt: str = "human", run_config: Optional[RunConfig] = None,
                 names: Optional[Sequence[str]] = None, schema_file: str = SCHEMA_PATH) -> bytes:
    """
    Render ``result`` as a human-readable table or a machine (JSON) document.

    Args:
        result: Fit, selection, coefficient search, comparison, simulation or forecast result.
        fmt (str): "human" or "machine".
        run_config (RunConfig, optional): Echoed in both formats.
        names (list, optional): Dataset column names used to label configurations.

    Returns:
        bytes: The encoded report.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
    writer = ReportWriter(schema_file, names)
    return writer.machine(result, run_config) if fmt == "machine" else writer.human(result, run_config)


def save_report(content: bytes, path: Optional[str]) -> None:
    """
    Write report bytes to ``path``, or to standard output when ``path`` is None.

    Raises:
        ReportWriteError: If the file cannot be written; the error carries the path.
    """
    if path is None:
        sys.stdout.buffer.write(content)
        sys.stdout.flush()
        return
    write_bytes_file(path, content)
    logger.info(f"report written to: {path}")


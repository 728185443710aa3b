"""Scoring of single configurations and the explicit parallel map over candidates."""

import math
from typing import List, Optional, Sequence

from joblib import Parallel, delayed

from src.components.ols_estimator import fit
from src.exception.exception import CustomException, HQCUndefinedError, InvalidConfigError, RankDeficientError
from src.logging.logger import logger
from src.models.var_types import CandidateEvaluation, CriterionKind, ModelConfig, TimeSeriesDataset

# Threads: the work is numpy-bound and releases the GIL, and threads avoid
# pickling the dataset for every batch.
DEFAULT_PREFER = "threads"


def evaluate_config(ds: TimeSeriesDataset, cfg: ModelConfig, kind: CriterionKind,
                    common_row_start: Optional[int] = None) -> CandidateEvaluation:
    """
    Fit ``cfg`` by OLS on the common sample and score it with ``kind``.

    Failures never raise: a rank-deficient design scores +inf with flag
    ``rank_deficient``; an invalid config or undefined criterion scores +inf too.
    A singular residual covariance scores -inf with flag ``degenerate``.
    """
    kind = CriterionKind(kind)
    try:
        result = fit(ds, cfg, common_row_start)
    except RankDeficientError as e:
        logger.warning(f"rank deficient candidate {cfg.describe(ds.names)}: rank {e.rank}/{e.n_columns}")
        return CandidateEvaluation(math.inf, None, "rank_deficient", str(e))
    except InvalidConfigError as e:
        return CandidateEvaluation(math.inf, None, "invalid", str(e))
    except CustomException as e:
        return CandidateEvaluation(math.inf, None, "error", str(e))

    if kind not in result.criterion_values:
        message = str(HQCUndefinedError(result.effective_T))
        return CandidateEvaluation(math.inf, None, "criterion_undefined", message)
    value = result.criterion_values[kind]
    flag = "degenerate" if result.degenerate else "ok"
    return CandidateEvaluation(value, result, flag)


def parallel_evaluate(candidates: Sequence[ModelConfig], ds: TimeSeriesDataset, kind: CriterionKind,
                      workers: int = 1, common_row_start: Optional[int] = None,
                      prefer: str = DEFAULT_PREFER) -> List[CandidateEvaluation]:
    """
    Evaluate candidates, possibly on several workers, returning results in
    candidate order. Each evaluation is a pure function of its inputs, so the output
    does not depend on ``workers``.

    Args:
        candidates: Configurations to score.
        ds: Shared read-only dataset.
        kind: Criterion to minimize.
        workers: Number of parallel workers (>= 1).
        common_row_start: Common sample start; defaults to the largest lag span of the batch.
        prefer: joblib backend preference ("threads" or "processes").
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    candidates = list(candidates)
    if not candidates:
        return []
    if common_row_start is None:
        common_row_start = max(c.lag_span for c in candidates)
    if workers == 1 or len(candidates) == 1:
        return [evaluate_config(ds, c, kind, common_row_start) for c in candidates]
    return Parallel(n_jobs=min(workers, len(candidates)), prefer=prefer)(
        delayed(evaluate_config)(ds, c, kind, common_row_start) for c in candidates
    )

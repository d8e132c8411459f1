"""
Result rows for single points and parameter sweeps.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from config.settings import config
from core.guardrails import assess_validity
from models.physics import QuenchSpec, SystemParams
from models.run import ResultRow, RunConfig
from services import entanglement, quench as quench_service

logger = logging.getLogger(__name__)


def compute_row(params: SystemParams, quench: QuenchSpec, swept_value: Optional[float] = None) -> ResultRow:
    """
    Closed-form observables for one parameter point.

    The validity flag is raised when any probability exceeds 0.5 or any
    first-order dressing coefficient exceeds 0.3 in magnitude.
    """
    amps = quench_service.quench_amplitudes(params, quench)
    probs = quench_service.dle_probabilities(params, quench)
    conc = entanglement.conditional_concurrences(params, quench)
    warning, reason = assess_validity(
        [probs.w_10, probs.w_01, probs.w_11],
        [quench_service.max_first_order_coefficient(params, quench)],
    )
    if warning:
        logger.debug(f"Validity warning at swept value {swept_value}: {reason}")
    return ResultRow(
        swept_value=swept_value,
        w_10=probs.w_10,
        w_01=probs.w_01,
        w_11=probs.w_11,
        c_1=conc.c_1,
        c_2=conc.c_2,
        a_1_10=amps.a_1_10,
        a_0_11=amps.a_0_11,
        a_2_11=amps.a_2_11,
        a_2_00=amps.a_2_00,
        validity_warning=warning,
    )


def run_sweep(run: RunConfig, workers: Optional[int] = None) -> List[ResultRow]:
    """
    Evaluate every grid point of the configured sweep.

    Points run on a thread pool; rows are returned in grid order. Without a
    sweep the single configured point is evaluated.
    """
    if run.sweep is None:
        return [compute_row(run.params, run.quench)]

    sweep = run.sweep
    user_values = sweep.user_grid()
    internal_values = sweep.internal_grid(run.unit)

    def point(index: int) -> ResultRow:
        params, quench = run.with_value(sweep.name, float(internal_values[index]))
        return compute_row(params, quench, swept_value=float(user_values[index]))

    workers = workers or config.WORKERS
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(point, range(sweep.steps)))

    flagged = sum(row.validity_warning for row in rows)
    logger.info(f"Sweep over {sweep.name}: {len(rows)} rows, {flagged} flagged")
    return rows

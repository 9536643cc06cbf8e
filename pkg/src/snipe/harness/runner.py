"""Multi-trial experiment execution."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..estimators import GROUSE, SNIPE, ZeroFillSVD
from ..linalg import grassmann_distance
from ..model import stream_blocks
from .report import ExperimentReport, TraceRow
from .spec import trial_config

logger = logging.getLogger(__name__)

WORKERS_ENV = "SNIPE_WORKERS"


def _grouse_seed(seed):
    # separate child of the trial seed; the stream itself uses children 0-2
    return int(np.random.SeedSequence(int(seed)).spawn(4)[3].generate_state(1)[0])


def make_estimators(names, r, options, seed):
    opts = dict(options)
    built = {}
    for name in names:
        if name == "snipe":
            built[name] = SNIPE(r, min_block_guard=opts.get("min_block_guard", True))
        elif name == "grouse":
            built[name] = GROUSE(
                r, step_scale=opts.get("grouse_step_scale", 100.0), random_state=_grouse_seed(seed)
            )
        elif name == "zero_fill":
            built[name] = ZeroFillSVD(r)
        else:
            raise ValueError(f"unknown estimator {name!r}")
    return built


def run_trial(cfg, estimators, options=None):
    """Feed one stream to every estimator and record the distance after each block.

    All estimators see the identical blocks. Returns ``(t, errors)`` where
    ``t[k]`` is the number of vectors consumed after block ``k + 1`` and
    ``errors[name]`` is the list of distances.
    """
    ests = make_estimators(estimators, cfg.r, options or {}, cfg.seed)
    errors = {name: [] for name in estimators}
    t = []
    seen = 0
    for block, truth in stream_blocks(cfg):
        seen += block.b
        t.append(seen)
        for name, est in ests.items():
            est.partial_fit_block(block)
            errors[name].append(grassmann_distance(truth.basis, est.components_.T))
    return t, errors


def _run_task(task):
    cfg, estimators, options = task
    return run_trial(cfg, estimators, options)


def resolve_workers(workers=None):
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            workers = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return max(1, int(workers or 1))


def run_experiment(spec, workers=None):
    """Run every (sweep point, trial) of ``spec`` and collect an :class:`ExperimentReport`.

    Rows are ordered by estimator, sweep point, trial and block regardless of
    the order in which parallel trials finish.
    """
    workers = resolve_workers(workers if workers is not None else spec.workers)
    options = spec.resolved_options
    points = spec.points()
    tasks = [
        (trial_config(cfg, i), spec.estimators, options)
        for _, cfg in points
        for i in range(spec.trials)
    ]
    logger.info("%s: %d trials on %d worker(s)", spec.name, len(tasks), workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]

    rows = []
    for est in spec.estimators:
        for p_idx, (value, _) in enumerate(points):
            for trial in range(spec.trials):
                t, errors = results[p_idx * spec.trials + trial]
                rows.extend(
                    TraceRow(est, spec.axis, value, trial, k + 1, t[k], err)
                    for k, err in enumerate(errors[est])
                )
    return ExperimentReport(spec.name, spec.axis, rows)

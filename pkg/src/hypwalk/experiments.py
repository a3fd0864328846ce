"""Desk-scale experiments measuring the asymptotic behaviour of random walks.

Each experiment turns one quantitative statement about random walks on
hyperbolic-space actions into a seeded Monte-Carlo run with explicit
statistics: linear drift of the displacement, linear growth of translation
length, sublinearity of the symmetric Gromov product, exponential decay of
shadow hitting, matching/non-matching/self-matching frequencies along
geodesics, boundedness of joint coarse stabilizers, small-cancellation
certificates for the axis of a random element, the characteristic index of a
measure with a finite kernel, and exponential degree growth of random plane
Cremona maps.

The decayed quantities whose true rates involve existential constants (the
``B c^sqrt(n)`` bounds) are checked as trends and thresholds only; sample
sizes at desk scale cannot identify such rates, and no fitting of them is
attempted.

Every result is reproducible bit for bit from ``(name, params, seed)``: all
randomness flows through the per-trial streams of :mod:`hypwalk.walk`, and
aggregates are pure functions of the stored per-trial records (re-derivable
through :meth:`ExperimentResult.recompute_aggregates`).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import stats
from . import words as W
from .cremona import CremonaModel, dynamical_degree_estimate
from .errors import InputError, ResourceError
from .freegroup import (
    SemidirectOracle,
    exact_shadow_measure,
    fellow_traveling_delta,
    stab_census,
)
from .walk import FiniteMeasure, trial_rng

DRIFT_MIN_TRIALS = 30
MAX_TRUNCATED_FRACTION = 0.10


# ---------------------------------------------------------------------------
# Result container.


@dataclass
class ExperimentResult:
    name: str
    params: dict
    seed: int
    records: list
    aggregates: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    passed: bool | None = None
    failures: list = field(default_factory=list)

    def recompute_aggregates(self) -> dict:
        """Re-derive the aggregates from the stored per-trial records."""
        return _AGGREGATORS[self.name](self.records, self.params)

    def to_json_dict(self) -> dict:
        from . import __version__

        return {
            "experiment": self.name,
            "tool_version": __version__,
            "seed": self.seed,
            "params": _plain(self.params),
            "tolerances": _plain(self.tolerances),
            "records": _plain(self.records),
            "aggregates": _plain(self.aggregates),
            "passed": self.passed,
            "failures": list(self.failures),
        }

    def csv_tracks(self) -> dict:
        """One table per observable: rows (trial, n, observable, value),
        sorted by (trial, n)."""
        tracks: dict[str, list] = {}
        for record in self.records:
            trial = record.get("trial", 0)
            n = record.get("n", 0)
            for key, value in record.items():
                if key in ("trial", "n"):
                    continue
                tracks.setdefault(key, []).append((trial, n, key, value))
        for rows in tracks.values():
            rows.sort(key=lambda row: (row[0], row[1]))
        return tracks


def _plain(value):
    """JSON-safe copy: Fractions to strings, tuples to lists, numpy to int."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return repr(value)
    return value


_AGGREGATORS: dict = {}


def _aggregator(name):
    def register(fn):
        _AGGREGATORS[name] = fn
        return fn

    return register


# ---------------------------------------------------------------------------
# The shared tree-walk fold: one pass per trial, observables at marks.


def _tree_trial_rows(args) -> list:
    """Worker: fold one trial's reduced word, evaluating observables at marks.

    Top-level (picklable) so trials can fan out to worker processes; records
    come back in trial order regardless of scheduling.
    """
    measure, marks, seed, trial, observables = args
    oracle = measure.oracle
    semidirect = isinstance(oracle, SemidirectOracle)
    n_max = marks[-1]
    indices = measure.increment_indices(n_max, seed, trial)
    atom_words = [
        (a.element.word if semidirect else a.element) for a in measure.atoms
    ]
    letters: list[int] = []
    rows = []
    mark_set = set(marks)
    step = 0
    for index in indices:
        for letter in atom_words[index]:
            if letters and letters[-1] == -letter:
                letters.pop()
            else:
                letters.append(letter)
        step += 1
        if step in mark_set:
            word = tuple(letters)
            row = {"trial": trial, "n": step}
            for name, evaluate in observables:
                row[name] = evaluate(word, step)
            rows.append(row)
    return rows


def _run_tree_trials(measure, marks, seed, trials, observables, jobs=1) -> list:
    if any(m < 1 for m in marks):
        raise InputError("observation marks must be >= 1")
    args = [(measure, marks, seed, t, observables) for t in range(trials)]
    if jobs <= 1:
        chunks = [_tree_trial_rows(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_tree_trial_rows, args, chunksize=8))
    return [row for chunk in chunks for row in chunk]


def _sym_gp_of_word(word) -> int:
    """Common prefix length of w and w^-1: compare w[i] against -w[-1-i]."""
    n = len(word)
    i = 0
    while i < n and word[i] == -word[n - 1 - i]:
        i += 1
    return i


def _obs_displacement(word, n):
    return len(word)


def _obs_tau(word, n):
    return W.translation_length(word)


def _obs_sym_gp(word, n):
    return _sym_gp_of_word(word)


def _is_tree(measure: FiniteMeasure) -> bool:
    from .freegroup import FreeGroupOracle

    return isinstance(measure.oracle, (FreeGroupOracle, SemidirectOracle))


def _generic_observable_rows(measure, marks, seed, trials, tau_budget=None) -> list:
    """Slow path for non-tree oracles: prefix snapshots through sample_path.

    Each mark replays the walk's prefix (same increment stream), so the
    endpoint observables (symmetric Gromov product, budgeted translation
    length) are available at every grid point.
    """
    from .geometry import gromov_product
    from .walk import sample_path

    oracle = measure.oracle
    rows = []
    for trial in range(trials):
        for n in marks:
            path = sample_path(measure, n, seed, trial)
            if path.truncated_at is not None or path.final is None:
                rows.append({"trial": trial, "n": n, "truncated": True})
                continue
            w, winv = path.final, path.final_inverse
            try:
                gp = gromov_product(
                    path.final_displacement,
                    oracle.displacement(winv),
                    oracle.pairwise_distance(w, winv),
                )
                row = {
                    "trial": trial,
                    "n": n,
                    "d": path.final_displacement,
                    "sym_gp": gp,
                    "truncated": False,
                }
                if tau_budget is not None:
                    row["tau"] = oracle.translation_length_estimate(w, tau_budget)
            except ResourceError:
                row = {"trial": trial, "n": n, "truncated": True}
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Drift.


def estimate_drift(
    measure: FiniteMeasure,
    n: int,
    trials: int,
    seed: int,
    expected: float | None = None,
    tolerance: float = 0.02,
    jobs: int = 1,
) -> ExperimentResult:
    """Mean of d(x, w_n x)/n with a normal confidence interval.

    For Cremona measures the record also carries log(deg w_n)/n, the
    exponential-growth version of the same limit, and trials cut short by
    the degree cap are reported (the run fails if more than 10% truncate).
    """
    if trials < DRIFT_MIN_TRIALS:
        raise InputError(f"drift estimation needs at least {DRIFT_MIN_TRIALS} trials")
    params = {
        "n": n,
        "trials": trials,
        "expected": expected,
        "measure": describe_measure(measure),
    }
    if isinstance(measure.oracle, CremonaModel):
        records = _cremona_drift_records(measure, [n], seed, trials)
    else:
        records = _run_tree_trials(
            measure, [n], seed, trials, [("d", _obs_displacement)], jobs
        )
    result = ExperimentResult(
        "drift", params, seed, records, tolerances={"mean_abs_error": tolerance}
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    if result.aggregates["truncated_fraction"] > MAX_TRUNCATED_FRACTION:
        failures.append(
            f"resource: truncated fraction "
            f"{result.aggregates['truncated_fraction']:.3f} "
            f"exceeds {MAX_TRUNCATED_FRACTION}"
        )
    if expected is not None:
        err = abs(result.aggregates["mean_speed"] - expected)
        if err > tolerance:
            failures.append(
                f"|mean speed - {expected}| = {err:.4f} exceeds {tolerance}"
            )
    result.failures = failures
    result.passed = not failures
    return result


@_aggregator("drift")
def _aggregate_drift(records, params):
    n = params["n"]
    complete = [r for r in records if not r.get("truncated", False)]
    speeds = [r["d"] / n for r in complete]
    out = {
        "mean_speed": stats.mean(speeds) if speeds else float("nan"),
        "speed_se": stats.standard_error(speeds),
        "speed_ci95": stats.normal_ci(speeds) if speeds else None,
        "truncated_fraction": 1.0 - len(complete) / len(records),
        "trials_used": len(complete),
    }
    if complete and "log_deg" in complete[0]:
        rates = [r["log_deg"] / n for r in complete]
        out["mean_log_degree_rate"] = stats.mean(rates)
        out["log_degree_rate_se"] = stats.standard_error(rates)
    return out


def _cremona_drift_records(measure, marks, seed, trials) -> list:
    records = []
    for trial in range(trials):
        records.extend(_cremona_trial_rows(measure, marks, seed, trial))
    return records


def _cremona_trial_rows(measure, marks, seed, trial):
    from .walk import sample_path

    n_max = marks[-1]
    path = sample_path(measure, n_max, seed, trial)
    rows = []
    for n in marks:
        if path.truncated_at is not None and n > path.truncated_at:
            rows.append(
                {"trial": trial, "n": n, "truncated": True, "d": float("nan")}
            )
            continue
        d = path.displacements[n]
        rows.append(
            {
                "trial": trial,
                "n": n,
                "truncated": False,
                "d": d,
                "log_deg": math.log(round(math.cosh(d))),
                "degree": int(round(math.cosh(d))),
                "prime_retries": path.prime_retries,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Translation length growth.


def translation_growth(
    measure: FiniteMeasure,
    n_grid,
    trials: int,
    seed: int,
    drift_tolerance: float = 0.03,
    tau_budget: int = 4,
    jobs: int = 1,
) -> ExperimentResult:
    """tau(w_n)/n against the drift, plus the thin-triangle residual
    d(x, w_n x) - 2<w_n x, w_n^-1 x>_x - tau(w_n), reported as a diagnostic
    (it is O(delta), identically 0 on a tree).

    Tree models use the exact cyclic-reduction translation length; other
    oracles fall back to the budgeted one-sided estimate, whose excess is at
    most d(x, w_n x)/budget.
    """
    marks = sorted(n_grid)
    params = {
        "n_grid": marks,
        "trials": trials,
        "measure": describe_measure(measure),
    }
    if _is_tree(measure):
        records = _run_tree_trials(
            measure,
            marks,
            seed,
            trials,
            [("d", _obs_displacement), ("tau", _obs_tau), ("sym_gp", _obs_sym_gp)],
            jobs,
        )
    else:
        params["tau_budget"] = tau_budget
        records = _generic_observable_rows(
            measure, marks, seed, trials, tau_budget=tau_budget
        )
    result = ExperimentResult(
        "translation_growth",
        params,
        seed,
        records,
        tolerances={"drift_gap": drift_tolerance},
    )
    result.aggregates = result.recompute_aggregates()
    gap = result.aggregates["per_n"][str(marks[-1])]["drift_gap"]
    result.failures = (
        []
        if gap <= drift_tolerance
        else [f"|mean tau/n - mean d/n| = {gap:.4f} exceeds {drift_tolerance}"]
    )
    result.passed = not result.failures
    return result


@_aggregator("translation_growth")
def _aggregate_translation(records, params):
    per_n = {}
    for n in params["n_grid"]:
        rows = [
            r for r in records if r["n"] == n and not r.get("truncated", False)
        ]
        taus = [r["tau"] / n for r in rows]
        speeds = [r["d"] / n for r in rows]
        residuals = [r["d"] - 2 * r["sym_gp"] - r["tau"] for r in rows]
        per_n[str(n)] = {
            "mean_tau_over_n": stats.mean(taus),
            "tau_se": stats.standard_error(taus),
            "mean_speed": stats.mean(speeds),
            "drift_gap": abs(stats.mean(taus) - stats.mean(speeds)),
            "max_abs_residual": max(abs(r) for r in residuals),
        }
    return {"per_n": per_n}


# ---------------------------------------------------------------------------
# Sublinearity of the symmetric Gromov product.


def gromov_tail(
    measure: FiniteMeasure,
    n_grid,
    trials: int,
    seed: int,
    epsilon: float = 0.1,
    threshold: float = 0.01,
    jobs: int = 1,
) -> ExperimentResult:
    """Tail frequency P(<w_n x, w_n^-1 x>_x >= epsilon n) per n.

    The product is stochastically bounded while the threshold grows
    linearly, so the frequencies should sit near zero at every n; the
    median track is reported as the sublinearity proxy."""
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    marks = sorted(n_grid)
    params = {
        "n_grid": marks,
        "trials": trials,
        "epsilon": epsilon,
        "measure": describe_measure(measure),
    }
    if _is_tree(measure):
        records = _run_tree_trials(
            measure, marks, seed, trials, [("sym_gp", _obs_sym_gp)], jobs
        )
    else:
        records = _generic_observable_rows(measure, marks, seed, trials)
    result = ExperimentResult(
        "gromov_tail", params, seed, records, tolerances={"tail_threshold": threshold}
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    for n in marks:
        freq = result.aggregates["per_n"][str(n)]["tail_frequency"]
        if freq > threshold:
            failures.append(f"tail frequency {freq:.4f} at n={n} exceeds {threshold}")
    result.failures = failures
    result.passed = not failures
    return result


@_aggregator("gromov_tail")
def _aggregate_gromov_tail(records, params):
    epsilon = params["epsilon"]
    per_n = {}
    log_points = []
    for n in params["n_grid"]:
        rows = [
            r for r in records if r["n"] == n and not r.get("truncated", False)
        ]
        hits = sum(1 for r in rows if r["sym_gp"] >= epsilon * n)
        freq = hits / len(rows)
        per_n[str(n)] = {
            "tail_frequency": freq,
            "tail_wilson95": stats.wilson_interval(hits, len(rows), 1.96),
            "median_sym_gp": stats.median([r["sym_gp"] for r in rows]),
        }
        if freq > 0:
            log_points.append((n, math.log(freq)))
    slope = (
        stats.least_squares_slope(*zip(*log_points)) if len(log_points) >= 2 else None
    )
    return {"per_n": per_n, "log_frequency_slope": slope}


# ---------------------------------------------------------------------------
# Shadow decay.


def shadow_decay(
    measure: FiniteMeasure,
    m_grid,
    samples: int,
    seed: int,
    wilson_z: float = 3.0,
    slope_rtol: float = 0.10,
    settle_steps: int = 64,
    chunk: int = 10_000,
) -> ExperimentResult:
    """Frequency of the walk's limit point falling behind a fixed vertex at
    distance m, against the exact harmonic measure 1/(2k (2k-1)^(m-1)).

    The limit's depth-m prefix is read off after m + settle_steps steps; the
    probability that the prefix changes later is below (2k-1)^-settle_steps,
    negligible against the Monte-Carlo error.  Exact comparison requires the
    uniform measure; other measures get an empirical-only report.
    """
    oracle = measure.oracle
    rank = getattr(oracle, "rank", None)
    if rank is None:
        raise InputError("shadow decay runs on the tree models")
    m_grid = sorted(m_grid)
    uniform = _is_uniform_letter_measure(measure)
    params = {
        "m_grid": m_grid,
        "samples": samples,
        "rank": rank,
        "uniform": uniform,
        "wilson_z": wilson_z,
        "chunk": chunk,
        "measure": describe_measure(measure),
    }
    # Fixed target prefix: alternating generators 1, 2, 1, 2, ...  Samples
    # are drawn in chunks, one Philox stream per (m, chunk) with the chunk
    # index as the trial key; this scheme is part of the declared parameters.
    single_letter = all(len(a.element) == 1 for a in measure.atoms)
    records = []
    for mark, m in enumerate(m_grid):
        target = tuple((1, 2)[i % 2] for i in range(m))
        n_steps = m + settle_steps
        done = 0
        chunk_id = 0
        while done < samples:
            batch = min(chunk, samples - done)
            stream_trial = (mark << 32) | chunk_id
            indices = measure.increment_indices(
                n_steps * batch, seed, stream_trial
            ).reshape(batch, n_steps)
            if single_letter:
                hits = _prefix_hits_vectorized(measure, indices, target)
            else:
                hits = _prefix_hits_scalar(measure, indices, target)
            records.append(
                {"trial": chunk_id, "n": m, "hits": hits, "samples": batch}
            )
            done += batch
            chunk_id += 1
    result = ExperimentResult(
        "shadow_decay",
        params,
        seed,
        records,
        tolerances={"wilson_z": wilson_z, "slope_rtol": slope_rtol},
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    if uniform:
        for m in m_grid:
            agg = result.aggregates["per_m"][str(m)]
            lo, hi = agg["wilson_band"]
            exact = agg["exact"]
            if not (lo <= exact <= hi):
                failures.append(
                    f"m={m}: exact measure {exact:.6f} outside the "
                    f"{wilson_z}-sigma Wilson band ({lo:.6f}, {hi:.6f})"
                )
        slope = result.aggregates["decay_slope"]
        target_slope = -math.log(2 * rank - 1)
        if slope is None or abs(slope - target_slope) > slope_rtol * abs(target_slope):
            failures.append(
                f"fitted decay slope {slope} deviates more than {slope_rtol:.0%} "
                f"from {target_slope:.4f}"
            )
        result.failures = failures
        result.passed = not failures
    return result


def _prefix_hits_vectorized(measure, indices, target) -> int:
    """Count rows whose reduced word starts with ``target`` (single-letter
    atoms only): a stack fold ran across all rows at once."""
    letters = np.array([a.element[0] for a in measure.atoms], dtype=np.int64)
    inc = letters[indices]
    rows, steps = inc.shape
    stack = np.zeros((rows, steps + 1), dtype=np.int64)
    ptr = np.zeros(rows, dtype=np.int64)
    row_ids = np.arange(rows)
    for t in range(steps):
        cur = inc[:, t]
        top = stack[row_ids, np.maximum(ptr - 1, 0)]
        cancel = (ptr > 0) & (top == -cur)
        ptr = np.where(cancel, ptr - 1, ptr + 1)
        keep = ~cancel
        stack[row_ids[keep], ptr[keep] - 1] = cur[keep]
    m = len(target)
    if m == 0:
        return rows
    good = ptr >= m
    prefix = stack[:, :m]
    good &= (prefix == np.array(target, dtype=np.int64)).all(axis=1)
    return int(good.sum())


def _prefix_hits_scalar(measure, indices, target) -> int:
    hits = 0
    m = len(target)
    for row in indices:
        word: list[int] = []
        for index in row:
            for letter in measure.atoms[index].element:
                if word and word[-1] == -letter:
                    word.pop()
                else:
                    word.append(letter)
        if tuple(word[:m]) == target:
            hits += 1
    return hits


def _is_uniform_letter_measure(measure: FiniteMeasure) -> bool:
    rank = measure.oracle.rank
    if len(measure.atoms) != 2 * rank:
        return False
    expected = {(g,) for g in range(1, rank + 1)} | {
        (-g,) for g in range(1, rank + 1)
    }
    support = {a.element for a in measure.atoms}
    weights = {a.weight for a in measure.atoms}
    return support == expected and weights == {Fraction(1, 2 * rank)}


@_aggregator("shadow_decay")
def _aggregate_shadow(records, params):
    rank = params["rank"]
    z = params["wilson_z"]
    per_m = {}
    points = []
    for m in params["m_grid"]:
        rows = [r for r in records if r["n"] == m]
        hits = sum(r["hits"] for r in rows)
        total = sum(r["samples"] for r in rows)
        freq = hits / total
        entry = {
            "frequency": freq,
            "hits": hits,
            "samples": total,
            "wilson_band": stats.wilson_interval(hits, total, z),
        }
        if params["uniform"]:
            entry["exact"] = float(exact_shadow_measure(m, rank))
        per_m[str(m)] = entry
        if freq > 0:
            points.append((m, math.log(freq)))
    slope = stats.least_squares_slope(*zip(*points)) if len(points) >= 2 else None
    return {"per_m": per_m, "decay_slope": slope}


# ---------------------------------------------------------------------------
# Matching census (axis matches, non-matches, self matches).


def match_census(
    kind: str,
    measure: FiniteMeasure,
    seed: int,
    trials: int,
    n: int | None = None,
    n_grid=None,
    axis_core=None,
    L: int = 10,
    pattern_length: int = 30,
    s_grid=(10, 20, 30),
    self_match_fraction: float = 0.2,
    axis_threshold: float = 0.95,
    non_match_threshold: float = 0.05,
    jobs: int = 1,
) -> ExperimentResult:
    """Frequencies of geodesic matching events along [x, w_n x].

    kind "axis": a length-L subword lying on a group translate of the axis
    of ``axis_core`` (both reading directions).  kind "non": a translate of
    a fixed random test pattern (its length-s prefixes, s in ``s_grid``)
    occurring inside the geodesic.  kind "self": two disjoint subsegments of
    length ``self_match_fraction * n`` equal up to a group translate.
    """
    if kind == "axis":
        if axis_core is None or n is None:
            raise InputError("axis matching needs axis_core and n")
        core = tuple(axis_core)
        observables = [
            ("match", lambda word, step: int(W.match_detect(word, core, L)))
        ]
        marks = [n]
        params = {
            "kind": kind,
            "n": n,
            "L": L,
            "trials": trials,
            "axis_core": W.word_to_str(core),
            "measure": describe_measure(measure),
        }
        tolerances = {"axis_threshold": axis_threshold}
    elif kind == "non":
        if n is None:
            raise InputError("non-matching needs n")
        pattern = _fixed_test_pattern(measure, pattern_length, seed)
        s_grid = sorted(s_grid)
        observables = [
            (
                f"pattern_s{s}",
                (lambda s_: lambda word, step: int(
                    _contains_translate(word, pattern[:s_])
                ))(s),
            )
            for s in s_grid
        ]
        marks = [n]
        params = {
            "kind": kind,
            "n": n,
            "trials": trials,
            "pattern": W.word_to_str(pattern),
            "s_grid": list(s_grid),
            "measure": describe_measure(measure),
        }
        tolerances = {"non_match_threshold": non_match_threshold}
    elif kind == "self":
        if n_grid is None:
            raise InputError("self matching needs n_grid")
        marks = sorted(n_grid)
        observables = [
            (
                "self_match",
                lambda word, step: int(
                    W.self_match_detect(word, max(1, int(self_match_fraction * step)))
                ),
            )
        ]
        params = {
            "kind": kind,
            "n_grid": marks,
            "trials": trials,
            "self_match_fraction": self_match_fraction,
            "measure": describe_measure(measure),
        }
        tolerances = {}
    else:
        raise InputError(f"unknown matching census kind {kind!r}")

    records = _run_tree_trials(measure, marks, seed, trials, observables, jobs)
    result = ExperimentResult(
        f"match_census_{kind}", params, seed, records, tolerances=tolerances
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    if kind == "axis":
        freq = result.aggregates["frequency"]
        if freq < axis_threshold:
            failures.append(
                f"axis match frequency {freq:.4f} below {axis_threshold}"
            )
    elif kind == "non":
        freqs = result.aggregates["per_s"]
        last = freqs[str(s_grid[-1])]["frequency"]
        if last > non_match_threshold:
            failures.append(
                f"non-match frequency {last:.4f} at s={s_grid[-1]} exceeds "
                f"{non_match_threshold}"
            )
        series = [freqs[str(s)]["frequency"] for s in s_grid]
        if any(b > a for a, b in zip(series, series[1:])):
            failures.append(f"non-match frequencies {series} not non-increasing in s")
    elif kind == "self":
        series = [
            result.aggregates["per_n"][str(n_)]["frequency"] for n_ in marks
        ]
        if any(b > a for a, b in zip(series, series[1:])):
            failures.append(f"self-match frequencies {series} not non-increasing in n")
    result.failures = failures
    result.passed = not failures
    return result


def _fixed_test_pattern(measure, length: int, seed: int) -> tuple:
    """A fixed random reduced word over the measure's support alphabet,
    drawn from the trial-(2^32) stream so it never collides with walk
    trials."""
    rank = measure.oracle.rank
    rng = trial_rng(seed, 2**32)
    letters: list[int] = []
    while len(letters) < length:
        g = int(rng.integers(1, rank + 1))
        s = 1 if int(rng.integers(0, 2)) else -1
        letter = s * g
        if letters and letters[-1] == -letter:
            continue
        letters.append(letter)
    return tuple(letters)


def _contains_translate(word, pattern) -> bool:
    """Does the geodesic word contain the pattern or its reversal-inverse?"""
    n, s = len(word), len(pattern)
    if s == 0 or n < s:
        return False
    mirrored = W.invert(pattern)
    for i in range(n - s + 1):
        window = word[i : i + s]
        if window == pattern or window == mirrored:
            return True
    return False


@_aggregator("match_census_axis")
def _aggregate_match_axis(records, params):
    hits = sum(r["match"] for r in records)
    return {
        "frequency": hits / len(records),
        "wilson95": stats.wilson_interval(hits, len(records), 1.96),
    }


@_aggregator("match_census_non")
def _aggregate_match_non(records, params):
    per_s = {}
    for s in params["s_grid"]:
        hits = sum(r[f"pattern_s{s}"] for r in records)
        per_s[str(s)] = {
            "frequency": hits / len(records),
            "wilson95": stats.wilson_interval(hits, len(records), 1.96),
        }
    return {"per_s": per_s}


@_aggregator("match_census_self")
def _aggregate_match_self(records, params):
    per_n = {}
    for n in params["n_grid"]:
        rows = [r for r in records if r["n"] == n]
        hits = sum(r["self_match"] for r in rows)
        per_n[str(n)] = {
            "frequency": hits / len(rows),
            "wilson95": stats.wilson_interval(hits, len(rows), 1.96),
        }
    return {"per_n": per_n}


# ---------------------------------------------------------------------------
# Asymptotic acylindricality: joint coarse stabilizer census.


def stab_acylindricity(
    measure: FiniteMeasure,
    K: int,
    n_grid,
    trials: int,
    seed: int,
    quantile: float = 0.99,
    census_cap: int = 4,
    jobs: int = 1,
) -> ExperimentResult:
    """Distribution of |Stab_K(x, w_n x)| per n; the minimal count covering
    a ``quantile`` fraction of trials must not depend on n."""
    oracle = measure.oracle
    rank = oracle.rank
    torsion_order = (
        oracle.torsion_group.order if isinstance(oracle, SemidirectOracle) else 1
    )
    marks = sorted(n_grid)
    params = {
        "K": K,
        "n_grid": marks,
        "trials": trials,
        "quantile": quantile,
        "torsion_order": torsion_order,
        "measure": describe_measure(measure),
    }

    def census_obs(word, step):
        return stab_census(word, K, rank, torsion_order, cap=census_cap)

    records = _run_tree_trials(
        measure, marks, seed, trials, [("census", census_obs)], jobs
    )
    result = ExperimentResult("stab_acylindricity", params, seed, records)
    result.aggregates = result.recompute_aggregates()
    quantiles = [
        result.aggregates["per_n"][str(n)]["quantile_count"] for n in marks
    ]
    result.failures = (
        []
        if len(set(quantiles)) == 1
        else [f"{quantile:.0%}-quantile census counts {quantiles} vary across n"]
    )
    result.passed = not result.failures
    return result


@_aggregator("stab_acylindricity")
def _aggregate_stab(records, params):
    per_n = {}
    for n in params["n_grid"]:
        counts = [r["census"] for r in records if r["n"] == n]
        per_n[str(n)] = {
            "quantile_count": stats.empirical_quantile(counts, params["quantile"]),
            "max_count": max(counts),
            "mean_count": stats.mean(counts),
        }
    return {"per_n": per_n}


# ---------------------------------------------------------------------------
# Small cancellation certificates.


@dataclass(frozen=True)
class CancellationCertificate:
    """Small-cancellation data for the conjugates of one loxodromic word.

    ``delta`` is the fellow-travelling constant (largest axis overlap with a
    translate by anything outside the axis stabilizer); on a tree it is
    computed exactly, so ``certified`` is always True here.  The injectivity
    radius of the conjugacy family equals tau on a tree.  The first
    small-cancellation requirement, inj >= A * delta_hyp, is vacuous on a
    0-hyperbolic space and reported as such.
    """

    tau: int
    delta: int
    certified: bool
    epsilon: float
    hyperbolicity_note: str
    passed: bool


def small_cancellation_certificate(
    w_word, A: float, epsilon: float
) -> CancellationCertificate:
    tau = W.translation_length(tuple(w_word))
    if tau == 0:
        raise InputError("small cancellation certificate needs a loxodromic word")
    delta = fellow_traveling_delta(tuple(w_word))
    return CancellationCertificate(
        tau=tau,
        delta=delta,
        certified=True,
        epsilon=epsilon,
        hyperbolicity_note=(
            f"inj >= A*delta holds vacuously on the tree (delta = 0, A = {A})"
        ),
        passed=delta <= epsilon * tau,
    )


def small_cancellation_experiment(
    measure: FiniteMeasure,
    n: int,
    trials: int,
    seed: int,
    epsilon: float = 0.1,
    A: float = 1.0,
    pass_threshold: float = 0.95,
    jobs: int = 1,
) -> ExperimentResult:
    """Frequency of random words whose conjugacy family satisfies the
    axis-overlap half of the small-cancellation condition at ratio epsilon."""
    params = {
        "n": n,
        "trials": trials,
        "epsilon": epsilon,
        "A": A,
        "measure": describe_measure(measure),
    }

    def certificate_obs(word, step):
        tau = W.translation_length(word)
        if tau == 0:
            return {"tau": 0, "delta": -1, "pass": 0, "loxodromic": 0}
        cert = small_cancellation_certificate(word, A, epsilon)
        return {
            "tau": cert.tau,
            "delta": cert.delta,
            "pass": int(cert.passed),
            "loxodromic": 1,
        }

    raw = _run_tree_trials(
        measure, [n], seed, trials, [("cert", certificate_obs)], jobs
    )
    records = []
    for row in raw:
        cert = row.pop("cert")
        row.update(cert)
        records.append(row)
    result = ExperimentResult(
        "small_cancellation",
        params,
        seed,
        records,
        tolerances={"pass_threshold": pass_threshold},
    )
    result.aggregates = result.recompute_aggregates()
    freq = result.aggregates["pass_frequency"]
    result.failures = (
        []
        if freq >= pass_threshold
        else [f"certificate pass frequency {freq:.4f} below {pass_threshold}"]
    )
    result.passed = not result.failures
    return result


@_aggregator("small_cancellation")
def _aggregate_small_cancellation(records, params):
    passes = sum(r["pass"] for r in records)
    return {
        "pass_frequency": passes / len(records),
        "loxodromic_frequency": stats.mean([r["loxodromic"] for r in records]),
        "max_delta": max(r["delta"] for r in records),
        "mean_tau": stats.mean([r["tau"] for r in records]),
    }


# ---------------------------------------------------------------------------
# Characteristic index.


def characteristic_index_experiment(
    measure: FiniteMeasure,
    n_grid,
    trials: int,
    seed: int,
    frequency_tolerance: float = 0.03,
) -> ExperimentResult:
    """The finite-kernel homomorphism under the random walk.

    Reports the characteristic index k (order of the image of the support's
    conjugation action inside Aut of the kernel), the per-n frequency of the
    walk's image being trivial (limit 1/k by equidistribution on the image
    group), the frequency for the k-th power (identically 1, not a
    statistic), and whether k = 1 coincides with the kernel being central.
    """
    oracle = measure.oracle
    if not isinstance(oracle, SemidirectOracle):
        raise InputError("characteristic index needs the semidirect model")
    if not measure.reversible:
        raise InputError(
            "characteristic index requires a reversible measure "
            "(support closed under inverses)"
        )
    marks = sorted(n_grid)

    # the image group H of the support inside Aut(kernel), as a Cayley table
    atom_images = [oracle.conjugation_on_kernel(a.element) for a in measure.atoms]
    elements = [tuple(range(oracle.torsion_group.order))]
    index_of = {elements[0]: 0}
    frontier = [elements[0]]
    while frontier:
        new_frontier = []
        for phi in frontier:
            for gen in atom_images:
                composed = tuple(gen(v) for v in phi)
                if composed not in index_of:
                    index_of[composed] = len(elements)
                    elements.append(composed)
                    new_frontier.append(composed)
        frontier = new_frontier
    k = len(elements)
    atom_to_image = np.array(
        [index_of[tuple(phi.images)] for phi in atom_images], dtype=np.int64
    )
    # table[state, image] = index of composition state . image
    table = np.zeros((k, len(measure.atoms)), dtype=np.int64)
    for s, phi in enumerate(elements):
        for a, gen in enumerate(atom_images):
            table[s, a] = index_of[tuple(phi[v] for v in gen.images)]

    n_max = marks[-1]
    increments = np.vstack(
        [measure.increment_indices(n_max, seed, t) for t in range(trials)]
    )
    state = np.zeros(trials, dtype=np.int64)
    records = []
    mark_set = set(marks)
    order_of = [_automorphism_order(phi, elements, index_of) for phi in elements]
    for step in range(1, n_max + 1):
        state = table[state, increments[:, step - 1]]
        if step in mark_set:
            for trial in range(trials):
                image = int(state[trial])
                records.append(
                    {
                        "trial": trial,
                        "n": step,
                        "image_trivial": int(image == 0),
                        # phi(w_n^k) = phi(w_n)^k: trivial iff the image's
                        # order divides k, which it always does in a group
                        # of order k
                        "kth_power_trivial": int(k % order_of[image] == 0),
                    }
                )

    from .freegroup import characteristic_index

    k_check = characteristic_index(oracle, [a.element for a in measure.atoms])
    if k_check != k:
        raise AssertionError(
            f"closure orders disagree: table build {k}, direct closure {k_check}"
        )
    kernel_central = oracle.torsion_group.is_abelian() and all(
        phi.images == tuple(range(oracle.torsion_group.order))
        for phi in atom_images
    )
    params = {
        "n_grid": marks,
        "trials": trials,
        "characteristic_index": k,
        "kernel_central": kernel_central,
        "expected_trivial_frequency": 1.0 / k,
        "measure": describe_measure(measure),
    }
    result = ExperimentResult(
        "characteristic_index",
        params,
        seed,
        records,
        tolerances={"frequency_tolerance": frequency_tolerance},
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    for n in marks:
        agg = result.aggregates["per_n"][str(n)]
        if abs(agg["trivial_frequency"] - 1.0 / k) > frequency_tolerance:
            failures.append(
                f"trivial-image frequency {agg['trivial_frequency']:.4f} at "
                f"n={n} outside {frequency_tolerance} of {1.0 / k:.4f}"
            )
        if agg["kth_power_frequency"] != 1.0:
            failures.append(f"phi(w_n^k) not identically trivial at n={n}")
    if (k == 1) != kernel_central:
        failures.append(
            "characteristic index 1 must coincide with a central kernel"
        )
    result.failures = failures
    result.passed = not failures
    return result


def _automorphism_order(phi, elements, index_of) -> int:
    order = 1
    current = phi
    identity = elements[0]
    while tuple(current) != identity:
        current = tuple(phi[v] for v in current)
        order += 1
    return order


@_aggregator("characteristic_index")
def _aggregate_char_index(records, params):
    per_n = {}
    for n in params["n_grid"]:
        rows = [r for r in records if r["n"] == n]
        per_n[str(n)] = {
            "trivial_frequency": stats.mean([r["image_trivial"] for r in rows]),
            "kth_power_frequency": stats.mean(
                [r["kth_power_trivial"] for r in rows]
            ),
        }
    return {"per_n": per_n, "characteristic_index": params["characteristic_index"]}


# ---------------------------------------------------------------------------
# Cremona degree growth.


def degree_growth_experiment(
    measure: FiniteMeasure,
    n_grid,
    trials: int,
    seed: int,
    iterate_budget: int = 2,
    gap_tolerance: float = 0.2,
    lambda_degree_bound: int = 12,
) -> ExperimentResult:
    """Exponential degree growth of random Cremona words.

    Tracks (1/n) log deg(w_n) on the grid.  On the subsample of trials whose
    endpoint degree is at most ``lambda_degree_bound`` (so that iterating it
    stays comfortably below the degree cap), also tracks (1/n) log of the
    budgeted dynamical-degree estimate and reports the gap between the two
    tracks at the largest n.  The subsample rule is part of the declared
    parameters; trials outside it are counted, not silently dropped.
    """
    model = measure.oracle
    if not isinstance(model, CremonaModel):
        raise InputError("degree growth runs on the Cremona model")
    marks = sorted(n_grid)
    params = {
        "n_grid": marks,
        "trials": trials,
        "iterate_budget": iterate_budget,
        "degree_cap": model.degree_cap,
        "lambda_degree_bound": lambda_degree_bound,
        "measure": describe_measure(measure),
    }
    from .walk import sample_path

    records = []
    n_max = marks[-1]
    for trial in range(trials):
        path = sample_path(measure, n_max, seed, trial)
        lambda_rate = None
        lambda_skipped = "truncated"
        if path.truncated_at is None and not path.discarded:
            if iterate_budget is None:
                lambda_skipped = "disabled"
            else:
                final_degree = int(round(math.cosh(path.displacements[-1])))
                iterable = (
                    final_degree <= lambda_degree_bound
                    and final_degree**iterate_budget <= model.degree_cap
                )
                if iterable and path.final is not None:
                    est = dynamical_degree_estimate(model, path.final, iterate_budget)
                    lambda_rate = (
                        math.log(est.value) / n_max if est.value > 0 else None
                    )
                    lambda_skipped = None
                else:
                    lambda_skipped = "cap"
        for n in marks:
            if path.discarded or (
                path.truncated_at is not None and n > path.truncated_at
            ):
                records.append(
                    {"trial": trial, "n": n, "truncated": True}
                )
                continue
            degree = int(round(math.cosh(path.displacements[n])))
            row = {
                "trial": trial,
                "n": n,
                "truncated": False,
                "degree": degree,
                "log_deg_rate": math.log(degree) / n if degree >= 1 else 0.0,
                "prime_retries": path.prime_retries,
            }
            if n == n_max and lambda_rate is not None:
                row["lambda_rate"] = lambda_rate
            elif n == n_max:
                row["lambda_skipped"] = lambda_skipped
            records.append(row)
    result = ExperimentResult(
        "degree_growth",
        params,
        seed,
        records,
        tolerances={"gap_tolerance": gap_tolerance},
    )
    result.aggregates = result.recompute_aggregates()
    failures = []
    agg = result.aggregates
    for n in marks:
        if agg["per_n"][str(n)]["mean_log_deg_rate"] <= 0:
            failures.append(f"mean log-degree rate not positive at n={n}")
    if iterate_budget is not None:
        if agg["lambda_track"]["subsample"] == 0:
            failures.append("resource: dynamical-degree subsample is empty")
        elif agg["lambda_track"]["gap"] > gap_tolerance:
            failures.append(
                f"gap {agg['lambda_track']['gap']:.4f} between degree and "
                f"dynamical-degree tracks exceeds {gap_tolerance}"
            )
    if agg["truncated_fraction"] > MAX_TRUNCATED_FRACTION:
        failures.append(
            f"resource: truncated fraction {agg['truncated_fraction']:.3f} "
            f"exceeds {MAX_TRUNCATED_FRACTION}"
        )
    result.failures = failures
    result.passed = not failures
    return result


@_aggregator("degree_growth")
def _aggregate_degree_growth(records, params):
    marks = params["n_grid"]
    n_max = marks[-1]
    per_n = {}
    for n in marks:
        rows = [r for r in records if r["n"] == n and not r["truncated"]]
        rates = [r["log_deg_rate"] for r in rows]
        per_n[str(n)] = {
            "mean_log_deg_rate": stats.mean(rates) if rates else float("nan"),
            "rate_se": stats.standard_error(rates),
            "trials_used": len(rows),
        }
    top_rows = [r for r in records if r["n"] == n_max and not r["truncated"]]
    matched = [r for r in top_rows if "lambda_rate" in r]
    lambda_track = {"subsample": len(matched)}
    if matched:
        deg_rates = [r["log_deg_rate"] for r in matched]
        lam_rates = [r["lambda_rate"] for r in matched]
        lambda_track.update(
            {
                "mean_log_deg_rate": stats.mean(deg_rates),
                "mean_lambda_rate": stats.mean(lam_rates),
                "gap": abs(stats.mean(deg_rates) - stats.mean(lam_rates)),
            }
        )
    total = sum(1 for r in records if r["n"] == n_max)
    truncated = sum(1 for r in records if r["n"] == n_max and r["truncated"])
    retried = sum(
        1
        for r in records
        if r["n"] == n_max and not r["truncated"] and r.get("prime_retries", 0) > 0
    )
    return {
        "per_n": per_n,
        "lambda_track": lambda_track,
        "truncated_fraction": truncated / total,
        "retried_trials": retried,
        "two_prime_agreement": 1.0,  # enforced per composition; disagreements retry
    }


# ---------------------------------------------------------------------------
# Exactness checks for the Cremona algebra (deterministic, no sampling).


def cremona_exactness(henon_power_budget: int = 6) -> ExperimentResult:
    """Exact composition identities: the quadratic involution squares to the
    identity, and the henon map's degree doubles under every power."""
    model = CremonaModel()
    sigma = model.sigma()
    records = []
    failures = []
    records.append({"trial": 0, "n": 0, "sigma_degree": sigma.degree})
    if sigma.degree != 2:
        failures.append(f"sigma degree {sigma.degree} != 2")
    square = model.multiply(sigma, sigma)
    records.append({"trial": 0, "n": 2, "sigma_square_degree": square.degree})
    if square != model.identity():
        failures.append("sigma squared is not the identity map")
    h = model.henon(2)
    power = h
    for n in range(1, henon_power_budget + 1):
        if n > 1:
            power = model.multiply(h, power)
        records.append({"trial": 1, "n": n, "henon_degree": power.degree})
        if power.degree != 2**n:
            failures.append(f"deg(henon^{n}) = {power.degree} != {2**n}")
    result = ExperimentResult(
        "cremona_exactness",
        {"henon_power_budget": henon_power_budget},
        0,
        records,
        failures=failures,
    )
    result.aggregates = result.recompute_aggregates()
    result.passed = not failures
    return result


@_aggregator("cremona_exactness")
def _aggregate_exactness(records, params):
    henon_rows = [r for r in records if "henon_degree" in r]
    return {
        "sigma_degree": next(r["sigma_degree"] for r in records if "sigma_degree" in r),
        "henon_degrees": [r["henon_degree"] for r in sorted(henon_rows, key=lambda r: r["n"])],
    }


# ---------------------------------------------------------------------------
# Measure description for reports.


def describe_measure(measure: FiniteMeasure) -> dict:
    return {
        "atoms": [
            {"tag": a.tag, "weight": str(a.weight)} for a in measure.atoms
        ],
        "symmetric": measure.symmetric,
        "reversible": measure.reversible,
        "bounded_displacement": measure.bounded_displacement,
        "attested_non_elementary": measure.attest_non_elementary,
        "attested_wpd": measure.attest_wpd,
    }

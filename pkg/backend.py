import logging
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

import helpers.config_manager as config_manager
import helpers.graded_module as graded_module
import helpers.hilbert_engine as hilbert_engine
import helpers.ideal_multiplicities as ideal_multiplicities
import helpers.koszul_euler as koszul_euler
import helpers.mixed_systems as mixed_systems
import helpers.problem_parser as problem_parser
import helpers.report_writer as report_writer
from helpers.errors import ConfigError, MixmultError, ParseError, StabilizationUncertain
from helpers.exact_algebra import Polynomial, format_dimension
from helpers.groebner import krull_dim

# --- Exit codes ---
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_PARSE_ERROR = 2
EXIT_UNCERTAIN = 3

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


# --- Logging ---
def setup_logging(level="INFO", log_file="mixmult.log"):
    """Root logger to a file and to stderr; stdout carries the JSON report only."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        try:
            handlers.insert(0, logging.FileHandler(Path(log_file)))
        except OSError as e:
            print(f"Cannot open log file {log_file}: {e}", file=sys.stderr)
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO), format=LOG_FORMAT, handlers=handlers)


# --- Settings ---
def effective_settings(doc=None, overrides=None, config_path=None):
    """Built-in < mixmult.toml < document defaults < command-line flags."""
    file_settings = config_manager.load_settings(config_path)
    layers = [file_settings]
    if doc is not None:
        layers.append(doc.defaults)
    if overrides:
        layers.append(overrides)
    return config_manager.merge_settings(*layers)


def _task_settings(settings, task):
    out = dict(settings)
    for key in ("seed", "window", "retries"):
        if task.get(key) is not None:
            out[key] = task.get(key)
    return out


def _grid(settings):
    return ideal_multiplicities.GridSettings.from_settings(settings)


# --- Task helpers ---
def _sequence(doc, task, settings):
    """The task's x (with optional 1-based blocks) or a generic filter-regular system of type k."""
    if task.get("x") is not None:
        blocks = task.get("blocks")
        if blocks is not None:
            blocks = tuple(b - 1 for b in blocks)
        return mixed_systems.ElementSequence.of(doc.ring, task.get("x"), blocks)
    return mixed_systems.build_filter_regular_sequence(
        doc.presentation, task.get("k"), settings["seed"], settings["retries"], settings["coefficient_bound"]
    )


def _element(doc, task, settings):
    if task.get("a") is not None:
        return task.get("a")
    return mixed_systems.sample_generic(doc.ring, task.get("block") - 1, settings["seed"], settings["coefficient_bound"])


def _submodule(doc, polys):
    M = doc.presentation
    zero = Polynomial.zero(doc.ring)
    return [graded_module.submodule_element(M, [p] + [zero] * (M.rank - 1)) for p in polys]


# --- Graded module tasks ---
def task_hilbert(doc, task, settings):
    M = doc.presentation
    hs = hilbert_engine.hilbert_series(M)
    hp = hilbert_engine.hilbert_polynomial(hs)
    result = {
        "numerator": hs.to_report(),
        "polynomial": str(hp),
        "threshold": list(hp.threshold),
        "dim": format_dimension(hp.total_degree),
    }
    if task.get("n") is not None:
        n = task.get("n")
        piece = graded_module.graded_piece_dim(M, n)
        series = hilbert_engine.series_coefficient(hs, n)
        result.update({"value": piece, "series_value": series, "holds": piece == series})
    return result


def task_dim(doc, task, settings):
    M = doc.presentation
    return {
        "value": format_dimension(hilbert_engine.dim_supp_pp(M)),
        "krull_dim": format_dimension(krull_dim(M)),
    }


def task_mixedmult(doc, task, settings):
    v = hilbert_engine.mixed_multiplicity(doc.presentation, task.get("k"))
    return {"value": v.value, "extended": v.extended, "k": list(v.k)}


def task_table(doc, task, settings):
    if doc.family is not None:
        fam = doc.family
        table = ideal_multiplicities.ideal_mixed_multiplicity_table(fam, _grid(settings))
        return {"table": table, "dim": format_dimension(ideal_multiplicities.saturation_dimension(fam))}
    M = doc.presentation
    return {
        "table": hilbert_engine.mixed_multiplicity_table(M),
        "dim": format_dimension(hilbert_engine.dim_supp_pp(M)),
    }


def task_chi(doc, task, settings):
    x = _sequence(doc, task, settings)
    chi = koszul_euler.euler_characteristic(doc.presentation, x, settings["window"])
    result = {"value": chi.value, "sequence": x.to_report(), "type": list(x.type), **chi.to_report()}
    if not chi.stable:
        result["status"] = "uncertain"
    return result


def task_symbol(doc, task, settings):
    x = _sequence(doc, task, settings)
    check = mixed_systems.symbol_order_check(doc.presentation, x, task.get("trials", 10), settings["seed"])
    return {"value": check["symbol"], "permuted": check["permuted"], "holds": check["holds"], "sequence": x.to_report()}


def task_chilemmas(doc, task, settings):
    x = _sequence(doc, task, settings)
    U = _submodule(doc, task.get("sub")) if task.get("sub") is not None else None
    checks = koszul_euler.verify_chi_lemmas(doc.presentation, x, U, settings["window"])
    return {"checks": checks, "holds": "fail" not in checks.values(), "value": checks["chi"], "sequence": x.to_report()}


def task_verify212(doc, task, settings):
    result = mixed_systems.filter_regular_length_formula(
        doc.presentation, task.get("k"), settings["seed"], settings["retries"], settings["coefficient_bound"], settings["window"]
    )
    result["value"] = result["E"]
    return result


def task_verify26(doc, task, settings):
    a = _element(doc, task, settings)
    block = task.get("block") - 1 if task.get("block") is not None else None
    result = hilbert_engine.difference_formula_check(doc.presentation, a, block if a.is_zero() else None)
    result["element"] = str(a)
    return result


def task_verify312(doc, task, settings):
    result = mixed_systems.verify_equality_theorem(
        doc.presentation, task.get("k"), settings["seed"], settings["retries"], settings["coefficient_bound"], settings["window"]
    )
    result["value"] = result["E"]
    return result


def task_verify316(doc, task, settings):
    a = _element(doc, task, settings)
    result = mixed_systems.reduction_formula_check(doc.presentation, a, task.get("k"))
    result["element"] = str(a)
    result["value"] = result["E"]
    return result


def task_verify319(doc, task, settings):
    result = mixed_systems.filter_regular_length_formula(
        doc.presentation,
        task.get("k"),
        settings["seed"],
        settings["retries"],
        settings["coefficient_bound"],
        settings["window"],
        with_chi=True,
    )
    result["value"] = result["E"]
    return result


def task_verify321(doc, task, settings):
    x = _sequence(doc, task, settings)
    result = mixed_systems.decomposition_formula_check(doc.presentation, x, task.get("k"))
    result["sequence"] = x.to_report()
    result["value"] = result["E"]
    return result


# --- Ideal family tasks ---
def task_idealmult(doc, task, settings):
    v = ideal_multiplicities.ideal_mixed_multiplicity(doc.family, task.get("k0"), task.get("k"), _grid(settings))
    return v.to_report()


def task_samuel(doc, task, settings):
    fam = doc.family
    value = ideal_multiplicities.samuel_multiplicity(fam.ring, fam.J, fam.N, _grid(settings))
    return {"value": value}


def task_oracle(doc, task, settings):
    fam = doc.family
    n0, n = task.get("n0"), task.get("n")
    length = ideal_multiplicities.associated_length(fam, n0, n)
    oracle = ideal_multiplicities.lattice_oracle(fam, n0, n)
    return {"value": length, "oracle": oracle, "holds": length == oracle}


def _ideal_verifier(func):
    def run(doc, task, settings):
        result = func(doc.family, task.get("k0"), task.get("k"), settings["seed"], _grid(settings))
        result["value"] = result["e"]
        return result
    return run


# name -> (description, function)
TASKS = {
    "hilbert": ("Hilbert series and polynomial", task_hilbert),
    "dim": ("Dimension of the ++ support", task_dim),
    "mixedmult": ("Mixed multiplicity E(M;k)", task_mixedmult),
    "table": ("Table of top mixed multiplicities", task_table),
    "chi": ("Koszul Euler characteristic", task_chi),
    "symbol": ("Mixed multiplicity symbol", task_symbol),
    "chilemmas": ("Euler characteristic lemma checks", task_chilemmas),
    "verify212": ("Filter-regular length formula", task_verify212),
    "verify26": ("Difference formula", task_verify26),
    "verify312": ("Equality E = chi = symbol", task_verify312),
    "verify316": ("Reduction formula", task_verify316),
    "verify319": ("Filter-regular equalities", task_verify319),
    "verify321": ("Decomposition formula", task_verify321),
    "idealmult": ("Mixed multiplicity of ideals", task_idealmult),
    "samuel": ("Samuel multiplicity", task_samuel),
    "oracle": ("Associated length against lattice count", task_oracle),
    "verify49": ("Ideal equality e = chi = symbol", _ideal_verifier(ideal_multiplicities.verify_ideal_main_theorem)),
    "verify410": ("Weak-(FC) length route", _ideal_verifier(ideal_multiplicities.verify_fc_length_route)),
    "verify413": ("Ideal decomposition formula", _ideal_verifier(ideal_multiplicities.verify_ideal_decomposition)),
    "verify416": ("Primary ideal decomposition", _ideal_verifier(ideal_multiplicities.verify_primary_case)),
}


# --- Running tasks ---
def _verdict(task, result, error):
    """pass / fail / uncertain plus a reason for anything but pass."""
    if task.expect_error is not None:
        if error is not None and getattr(error, "code", None) == task.expect_error:
            return "pass", None
        got = getattr(error, "code", type(error).__name__) if error is not None else "no error"
        return "fail", f"expected error {task.expect_error}, got {got}"
    if isinstance(error, StabilizationUncertain):
        return "uncertain", error.message
    if error is not None:
        return "fail", str(error)
    if result.get("status") == "uncertain":
        return "uncertain", "grid values have no validation margin"
    if not result.get("holds", True):
        return "fail", "identity does not hold"
    if task.expect is not None and result.get("value") != task.expect:
        return "fail", f"expected {task.expect}, got {result.get('value')}"
    return "pass", None


def run_task(doc, index, task, settings):
    """Runs one task; errors are caught and embedded."""
    description, func = TASKS[task.name]
    settings = _task_settings(settings, task)
    entry = {
        "index": index,
        "line": task.line,
        "task": task.name,
        "params": task.params,
        "seed": settings["seed"],
    }
    logging.info(f"Task {index} ({task.name}): {description}...")
    start = time.perf_counter()
    result, error = None, None
    try:
        result = func(doc, task, settings)
    except MixmultError as e:
        error = e
    except Exception as e:
        error = e
        logging.error(f"Task {index} ({task.name}) crashed:\n{traceback.format_exc()}")
    entry["elapsed"] = round(time.perf_counter() - start, 3)
    if result is not None:
        entry["result"] = result
    if error is not None:
        entry["error"] = error.to_dict() if isinstance(error, MixmultError) else {"code": type(error).__name__, "message": str(error)}
    entry["verdict"], reason = _verdict(task, result, error)
    if reason:
        entry["reason"] = reason
    if entry["verdict"] == "fail":
        logging.error(f"Task {index} ({task.name}) failed: {reason}")
    elif entry["verdict"] == "uncertain":
        logging.warning(f"Task {index} ({task.name}) uncertain: {reason}")
    else:
        logging.info(f"Task {index} ({task.name}) passed in {entry['elapsed']}s")
    return entry


def exit_code_for(entries):
    verdicts = [e["verdict"] for e in entries]
    if "fail" in verdicts:
        return EXIT_FAIL
    if "uncertain" in verdicts:
        return EXIT_UNCERTAIN
    return EXIT_PASS


def run_document(doc, settings):
    """One entry per task, in document order whatever the completion order."""
    jobs = max(1, int(settings.get("jobs", 1)))
    entries = [None] * len(doc.tasks)
    if doc.presentation is not None:
        # relations are computed once before tasks share the module
        doc.presentation.relations
    if jobs == 1 or len(doc.tasks) <= 1:
        for i, task in enumerate(doc.tasks):
            entries[i] = run_task(doc, i, task, settings)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(run_task, doc, i, task, settings): i for i, task in enumerate(doc.tasks)}
            for future in as_completed(futures):
                entries[futures[future]] = future.result()
    summary = {v: sum(1 for e in entries if e["verdict"] == v) for v in ("pass", "fail", "uncertain")}
    return {
        "settings": {k: v for k, v in settings.items() if k not in ("log_file", "log_level")},
        "tasks": entries,
        "summary": summary,
        "exit_code": exit_code_for(entries),
    }


def _error_report(path, error):
    logging.error(f"{path}: {error.message}")
    return {"document": str(path), "error": error.to_dict(), "tasks": [], "exit_code": EXIT_PARSE_ERROR}


def run_file(path, overrides=None, config_path=None):
    """Parses and runs one problem file; parse and config errors give exit code 2."""
    try:
        doc = problem_parser.load_problem(path)
        settings = effective_settings(doc, overrides, config_path)
    except (ParseError, ConfigError) as e:
        return _error_report(path, e)
    except OSError as e:
        return _error_report(path, ConfigError(f"cannot read {path}: {e}"))
    report = run_document(doc, settings)
    report["document"] = str(path)
    return report


def verify_corpus(directory, overrides=None, config_path=None):
    """Runs every .prob file and compares its report with the paired .expected.json."""
    directory = Path(directory)
    problems = sorted(directory.glob("*.prob"))
    if not problems:
        logging.warning(f"No .prob files in {directory}")
    results = []
    code = EXIT_PASS
    for path in problems:
        logging.info(f"Running {path.name}...")
        report = run_file(path, overrides, config_path)
        golden = report_writer.golden_path(path)
        if golden.exists():
            expected = report_writer.load_expected(golden)
            diffs = report_writer.compare_subset(expected, report_writer.to_jsonable(report))
        else:
            diffs = [f"{golden.name}: missing"]
        verdict = "pass" if not diffs else "fail"
        if report.get("exit_code") == EXIT_FAIL:
            verdict = "fail"
        elif verdict == "pass" and report.get("exit_code") == EXIT_UNCERTAIN:
            verdict = "uncertain"
        for diff in diffs:
            logging.error(f"{path.name}: {diff}")
        results.append({
            "document": path.name,
            "verdict": verdict,
            "differences": diffs,
            "exit_code": report.get("exit_code"),
        })
        if verdict == "fail":
            code = EXIT_FAIL
        elif verdict == "uncertain" and code == EXIT_PASS:
            code = EXIT_UNCERTAIN
    return {"corpus": str(directory), "documents": results, "exit_code": code}


def run_oracle(path, config_path=None):
    """Lattice-point counts against associated lengths on the ideal family's default window."""
    try:
        doc = problem_parser.load_problem(path)
        settings = effective_settings(doc, None, config_path)
    except (ParseError, ConfigError) as e:
        return _error_report(path, e)
    fam = doc.family
    if fam is None:
        return _error_report(path, ParseError("oracle needs an ideals line", 1, 1))
    lo = settings["grid_offset"]
    window = [range(lo, lo + settings["window"] + 1)] * (fam.d + 1)
    grid = ideal_multiplicities.associated_length_grid(fam, window, settings["jobs"])
    cells = []
    for cell, value in sorted(grid.values.items()):
        try:
            oracle = ideal_multiplicities.lattice_oracle(fam, cell[0], cell[1:])
        except MixmultError as e:
            return _error_report(path, e) | {"exit_code": EXIT_FAIL}
        cells.append({"cell": list(cell), "length": value, "oracle": oracle, "verdict": "pass" if value == oracle else "fail"})
    code = EXIT_FAIL if any(c["verdict"] == "fail" for c in cells) else EXIT_PASS
    return {"document": str(path), "cells": cells, "exit_code": code}

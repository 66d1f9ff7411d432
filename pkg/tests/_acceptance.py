"""Shared verdict registry for the acceptance suite."""

RESULTS = {}
SOLVER_RUNS = []


def record(number, title, ok, detail):
    RESULTS[number] = (title, bool(ok), detail)
    return ok


def log_run(label, report):
    SOLVER_RUNS.append((label, report.iterations, report.converged, report.rel_change))

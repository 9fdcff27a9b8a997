"""Small CSV helpers shared by the harness writers and readers."""

import csv


class CSVFormatError(ValueError):
    """A CSV file does not follow the expected schema; carries the line number."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path, self.lineno = path, lineno


def write_csv(path, columns, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(records)


def read_csv(path, columns, converters):
    """Yield typed dicts; a wrong header or bad field raises CSVFormatError."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(columns):
            raise CSVFormatError(path, 1, f"expected header {list(columns)}, got {header}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(columns):
                raise CSVFormatError(path, lineno, f"expected {len(columns)} fields, got {len(rec)}")
            try:
                rows.append({c: conv(v) for c, conv, v in zip(columns, converters, rec)})
            except ValueError as exc:
                raise CSVFormatError(path, lineno, str(exc)) from None
        return rows


def optional_int(s):
    return None if s == "" else int(s)


TRAIN_CURVE_COLUMNS = ["episode", "agent_steps", "updates", "n_instances", "mean_nodes",
                       "median_nodes", "best_nodes", "worst_nodes", "failures"]
TRAIN_CURVE_TYPES = [int, int, int, int, float, float, int, int, int]
EPISODE_COLUMNS = ["episode", "instance_seed", "status", "nodes", "decisions", "objective",
                   "return", "agent_steps"]
PROFILE_COLUMNS = ["solver", "tau", "rho"]

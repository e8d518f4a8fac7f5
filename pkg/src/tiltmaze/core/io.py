"""Plain-text persistence for trajectories, datasets, and model documents.

Tabular artifacts are comma-separated text with a fixed header row.  Floats
are written with ``repr``, whose shortest round-trip form parses back to the
identical bit pattern, so save/load is exact.  Missing values (unfiltered
velocities, absent targets, the action on a final sample) are empty fields.

Model documents are JSON with a ``format`` tag; the heavy derived quantities
(Cholesky factors) are never stored and get recomputed on load.
"""

import json
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .state import (AUGMENTED_COLUMNS, TRANSITION_COLUMNS, RegressionDataset,
                    Trajectory, TransitionDataset)

TRAJECTORY_COLUMNS = (
    "t", "ring", "theta", "theta_dot", "beta", "beta_dot", "gamma", "gamma_dot",
    "beta_ddot", "gamma_ddot", "u_beta", "u_gamma", "theta_ddot_target",
)
DATASET_COLUMNS = TRAJECTORY_COLUMNS
TRANSITIONS_COLUMNS = (
    "t", "ring", "theta", "theta_dot", "beta", "beta_dot", "gamma", "gamma_dot",
    "u_beta", "u_gamma", "delta_theta", "delta_theta_dot",
)
_SOURCE_PREFIX = "# source:"


def _fmt(value):
    if value is None:
        return ""
    value = float(value)
    if np.isnan(value):
        return ""
    return repr(value)


def _parse_float(field, path, row):
    if field == "":
        return np.nan
    try:
        return float(field)
    except ValueError:
        raise FileFormatError(f"{path}: row {row}: bad float field {field!r}") from None


def _write_table(path, header, rows, comments=()):
    lines = list(comments)
    lines.append(",".join(header))
    lines.extend(rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _read_table(path, expected_header):
    path = Path(path)
    try:
        raw = path.read_text()
    except FileNotFoundError:
        raise
    comments, header, body = [], None, []
    for i, line in enumerate(raw.splitlines(), start=1):
        if line.startswith("#"):
            comments.append(line)
            continue
        if header is None:
            header = line
            if header != ",".join(expected_header):
                raise FileFormatError(
                    f"{path}: row {i}: expected header {','.join(expected_header)!r}"
                )
            continue
        if line.strip():
            body.append((i, line))
    if header is None:
        raise FileFormatError(f"{path}: row 1: missing header row")
    return comments, body


def _row_fields(line, n_cols, path, row):
    fields = line.split(",")
    if len(fields) != n_cols:
        raise FileFormatError(
            f"{path}: row {row}: expected {n_cols} fields, got {len(fields)}"
        )
    return fields


def save_trajectory(path, traj):
    rows = []
    for k in range(len(traj)):
        rows.append(",".join([
            _fmt(traj.t[k]), str(int(traj.ring[k])), _fmt(traj.theta[k]),
            _fmt(traj.theta_dot[k]), _fmt(traj.beta[k]), _fmt(traj.beta_dot[k]),
            _fmt(traj.gamma[k]), _fmt(traj.gamma_dot[k]), _fmt(traj.beta_ddot[k]),
            _fmt(traj.gamma_ddot[k]), _fmt(traj.u[k, 0]), _fmt(traj.u[k, 1]),
            _fmt(traj.theta_ddot[k]),
        ]))
    _write_table(path, TRAJECTORY_COLUMNS, rows)


def load_trajectory(path):
    _, body = _read_table(path, TRAJECTORY_COLUMNS)
    n = len(body)
    if n < 2:
        raise FileFormatError(f"{path}: trajectory needs at least two rows")
    cols = {name: np.empty(n) for name in TRAJECTORY_COLUMNS if name != "ring"}
    ring = np.empty(n, dtype=int)
    for k, (row_no, line) in enumerate(body):
        fields = _row_fields(line, len(TRAJECTORY_COLUMNS), path, row_no)
        try:
            ring[k] = int(fields[1])
        except ValueError:
            raise FileFormatError(
                f"{path}: row {row_no}: bad ring field {fields[1]!r}"
            ) from None
        for name, field in zip(TRAJECTORY_COLUMNS, fields):
            if name == "ring":
                continue
            cols[name][k] = _parse_float(field, path, row_no)
    return Trajectory(
        t=cols["t"], ring=ring, theta=cols["theta"], theta_dot=cols["theta_dot"],
        beta=cols["beta"], beta_dot=cols["beta_dot"], gamma=cols["gamma"],
        gamma_dot=cols["gamma_dot"], beta_ddot=cols["beta_ddot"],
        gamma_ddot=cols["gamma_ddot"],
        u=np.column_stack([cols["u_beta"], cols["u_gamma"]]),
        theta_ddot=cols["theta_ddot_target"],
        trajectory_id=Path(path).stem,
    )


def save_dataset(path, dataset):
    comments = [f"{_SOURCE_PREFIX}{sid}" for sid in dataset.source_ids]
    rows = []
    x = dataset.inputs
    for k in range(len(dataset)):
        rows.append(",".join([
            _fmt(dataset.t[k]), str(dataset.ring),
            *[_fmt(v) for v in x[k]],
            _fmt(dataset.u[k, 0]), _fmt(dataset.u[k, 1]),
            _fmt(dataset.targets[k]),
        ]))
    _write_table(path, DATASET_COLUMNS, rows, comments)


def load_dataset(path):
    comments, body = _read_table(path, DATASET_COLUMNS)
    sources = tuple(c[len(_SOURCE_PREFIX):] for c in comments
                    if c.startswith(_SOURCE_PREFIX))
    n = len(body)
    t = np.empty(n)
    ring = np.empty(n, dtype=int)
    inputs = np.empty((n, len(AUGMENTED_COLUMNS)))
    u = np.empty((n, 2))
    targets = np.empty(n)
    for k, (row_no, line) in enumerate(body):
        fields = _row_fields(line, len(DATASET_COLUMNS), path, row_no)
        t[k] = _parse_float(fields[0], path, row_no)
        try:
            ring[k] = int(fields[1])
        except ValueError:
            raise FileFormatError(
                f"{path}: row {row_no}: bad ring field {fields[1]!r}"
            ) from None
        inputs[k] = [_parse_float(f, path, row_no) for f in fields[2:10]]
        u[k] = [_parse_float(fields[10], path, row_no),
                _parse_float(fields[11], path, row_no)]
        targets[k] = _parse_float(fields[12], path, row_no)
    if n and np.unique(ring).size > 1:
        raise FileFormatError(f"{path}: dataset mixes ring indices")
    if n and not np.all(np.isfinite(targets)):
        bad = int(np.nonzero(~np.isfinite(targets))[0][0])
        raise FileFormatError(f"{path}: row {body[bad][0]}: dataset target missing")
    return RegressionDataset(ring=int(ring[0]) if n else 1, t=t, inputs=inputs,
                             targets=targets, u=u, source_ids=sources)


def save_transitions(path, transitions):
    comments = [f"{_SOURCE_PREFIX}{sid}" for sid in transitions.source_ids]
    rows = []
    for k in range(len(transitions)):
        rows.append(",".join([
            _fmt(transitions.t[k]), str(transitions.ring),
            *[_fmt(v) for v in transitions.inputs[k]],
            _fmt(transitions.deltas[k, 0]), _fmt(transitions.deltas[k, 1]),
        ]))
    _write_table(path, TRANSITIONS_COLUMNS, rows, comments)


def load_transitions(path):
    comments, body = _read_table(path, TRANSITIONS_COLUMNS)
    sources = tuple(c[len(_SOURCE_PREFIX):] for c in comments
                    if c.startswith(_SOURCE_PREFIX))
    n = len(body)
    t = np.empty(n)
    ring = np.empty(n, dtype=int)
    inputs = np.empty((n, len(TRANSITION_COLUMNS)))
    deltas = np.empty((n, 2))
    for k, (row_no, line) in enumerate(body):
        fields = _row_fields(line, len(TRANSITIONS_COLUMNS), path, row_no)
        t[k] = _parse_float(fields[0], path, row_no)
        ring[k] = int(_parse_float(fields[1], path, row_no))
        inputs[k] = [_parse_float(f, path, row_no) for f in fields[2:10]]
        deltas[k] = [_parse_float(fields[10], path, row_no),
                     _parse_float(fields[11], path, row_no)]
    return TransitionDataset(ring=int(ring[0]) if n else 1, t=t, inputs=inputs,
                             deltas=deltas, source_ids=sources)


MODEL_FORMAT = "tiltmaze-model-v1"


def save_model_doc(path, doc):
    doc = dict(doc)
    doc["format"] = MODEL_FORMAT
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_model_doc(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise FileFormatError(f"{path}: row {err.lineno}: invalid JSON") from None
    if doc.get("format") != MODEL_FORMAT:
        raise FileFormatError(f"{path}: not a {MODEL_FORMAT} document")
    return doc

"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .traces import Trace, parse_trace

__all__ = ["check_traces", "check_labels", "check_propositions"]


def _one_trace(raw, width: int | None, index: int) -> Trace:
    if isinstance(raw, str):
        try:
            return parse_trace(raw, width)
        except ValueError as exc:
            raise ValueError(f"trace {index}: {exc}") from None
    arr = np.asarray(raw)
    if arr.ndim != 2:
        raise ValueError(f"trace {index}: expected a 2-D array (time x propositions), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"trace {index}: traces must be nonempty")
    if arr.dtype != bool:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"trace {index}: valuations must be 0/1 or boolean")
        arr = arr.astype(bool)
    return tuple(tuple(bool(b) for b in row) for row in arr)


def check_traces(X, n_propositions: int | None = None) -> list[Trace]:
    """Normalize a collection of traces to tuples of Boolean tuples.

    Each trace may be a 2-D array-like of shape ``(length, n_propositions)``
    or a string such as ``"1,0;0,1"``.  All traces must share one width.
    """
    if isinstance(X, (str, bytes)):
        raise ValueError("expected a sequence of traces, got a single string")
    traces = []
    width = n_propositions
    for i, raw in enumerate(X):
        u = _one_trace(raw, width, i)
        if width is None:
            width = len(u[0])
        elif len(u[0]) != width or any(len(v) != width for v in u):
            raise ValueError(f"trace {i}: expected {width} propositions per step")
        traces.append(u)
    if not traces:
        raise ValueError("at least one trace is required")
    return traces


def check_labels(y, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(is_positive, classes)`` for binary labels.

    Accepted encodings are {0, 1}, {False, True} and {-1, 1}; ``classes``
    lists the negative label first.
    """
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"labels must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] != n_samples:
        raise ValueError(f"got {arr.shape[0]} labels for {n_samples} traces")
    if arr.dtype == bool:
        return arr.copy(), np.array([False, True])
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"labels must be numeric or boolean, got dtype {arr.dtype}")
    values = set(np.unique(arr).tolist())
    if values <= {0, 1}:
        return arr == 1, np.array([0, 1])
    if values <= {-1, 1}:
        return arr == 1, np.array([-1, 1])
    raise ValueError(f"labels must be binary (0/1 or -1/1), got {sorted(values)}")


def check_propositions(propositions: Sequence[str] | None, width: int) -> tuple[str, ...]:
    if propositions is None:
        return tuple(f"x{j}" for j in range(width))
    props = tuple(propositions)
    if len(props) != width:
        raise ValueError(f"{len(props)} proposition names for traces of width {width}")
    return props

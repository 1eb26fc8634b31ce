"""Labeling authorities: programmatic ground truth, a simulated human that
may skip, and the pending-queue bookkeeping behind a live human labeler.

A skip verdict means the oracle declined to label; skipped instances never
enter the training set but still consume labeling budget (inspecting an
unlabelable sample is real annotator cost).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gaal.errors import ConfigError, ContractError
from gaal.svm import LabeledSet

SKIP = "skip"


@dataclass(frozen=True)
class OracleResponse:
    query_id: str
    verdict: object  # -1, +1, or SKIP

    def is_skip(self) -> bool:
        return self.verdict == SKIP


def _check_verdict(verdict) -> None:
    if verdict != SKIP and verdict not in (-1, 1):
        raise ContractError(f"verdict must be -1, +1 or {SKIP!r}, got {verdict!r}")


def ground_truth_label(truth_fn, x, query_id: str = "") -> OracleResponse:
    """Label by a known function; the sign convention matches the
    classifier's tie rule (0 maps to +1). Never skips."""
    value = float(truth_fn(np.asarray(x, dtype=np.float64)))
    return OracleResponse(query_id, 1 if value >= 0.0 else -1)


def nn_label(reference: LabeledSet, tau: float, x, query_id: str = "") -> OracleResponse:
    """Simulated human: answer with the nearest reference label, or skip
    when nothing lies within radius ``tau`` (an unrecognizable instance)."""
    if len(reference) == 0:
        raise ContractError("nn_label needs a non-empty reference set")
    if tau <= 0:
        raise ConfigError(f"skip radius must be positive, got {tau}")
    x = np.asarray(x, dtype=np.float64)
    dists = np.linalg.norm(reference.instances - x, axis=1)
    nearest = int(np.argmin(dists))  # argmin takes the lowest index on ties
    if dists[nearest] > tau:
        return OracleResponse(query_id, SKIP)
    return OracleResponse(query_id, int(reference.labels[nearest]))


def default_skip_radius(reference: LabeledSet) -> float:
    """Scale-free default tau: the 95th percentile of within-reference
    nearest-neighbor distances."""
    X = reference.instances
    if len(X) < 2:
        raise ContractError("need >= 2 reference instances to derive a skip radius")
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)
    nn = np.sqrt(np.maximum(d2.min(axis=1), 0.0))
    return float(np.percentile(nn, 95))


class GroundTruthOracle:
    def __init__(self, truth_fn):
        self.truth_fn = truth_fn

    def respond(self, x, query_id: str = "") -> OracleResponse:
        return ground_truth_label(self.truth_fn, x, query_id)


class NearestNeighborOracle:
    def __init__(self, reference: LabeledSet, tau: float | None = None):
        self.reference = reference
        self.tau = float(tau) if tau is not None else default_skip_radius(reference)

    def respond(self, x, query_id: str = "") -> OracleResponse:
        return nn_label(self.reference, self.tau, x, query_id)


class PendingQueue:
    """Outstanding queries awaiting human verdicts.

    The first verdict for a query wins; later duplicates and unknown ids are
    rejected without touching any state.
    """

    def __init__(self):
        self._pending: dict[str, object] = {}
        self.resolved: dict[str, object] = {}

    def issue(self, query_id: str, payload) -> None:
        if query_id in self._pending or query_id in self.resolved:
            raise ContractError(f"query id {query_id!r} already issued")
        self._pending[query_id] = payload

    def pending_ids(self) -> list[str]:
        return list(self._pending)

    def pending_items(self) -> list[tuple[str, object]]:
        return list(self._pending.items())

    def __len__(self) -> int:
        return len(self._pending)

    def apply(self, responses) -> tuple[list[OracleResponse], list[str]]:
        """Apply verdicts; returns (applied responses, rejected ids)."""
        applied, rejected = [], []
        for resp in responses:
            if resp.query_id not in self._pending:
                rejected.append(resp.query_id)
                continue
            _check_verdict(resp.verdict)
            del self._pending[resp.query_id]
            self.resolved[resp.query_id] = resp.verdict
            applied.append(resp)
        return applied, rejected

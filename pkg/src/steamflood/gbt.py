"""Regularized gradient-boosted regression trees with exact greedy splits.

Squared-error objective, second-order statistics (per round the gradient is
the residual and the hessian is 1), L2 leaf regularization, split penalty,
and optional per-tree row subsampling. Training is deterministic for a
fixed seed and independent of the worker count used for split search.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional, Union

import numpy as np
import pandas as pd

from .errors import (
    EmptyMatrix,
    NonFiniteInput,
    UntrainedModel,
    WidthMismatch,
)
from .features import FeatureMatrix

FORMAT_VERSION = 1


@dataclass(frozen=True)
class GbtParams:
    n_trees: int = 100
    max_depth: int = 5
    learning_rate: float = 0.1
    lambda_: float = 1.0  # leaf L2
    gamma: float = 0.0  # split penalty
    min_child_weight: float = 1.0
    subsample: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 0:
            raise ValueError("n_trees must be >= 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.lambda_ < 0 or self.gamma < 0 or self.min_child_weight < 0:
            raise ValueError("lambda_, gamma, min_child_weight must be >= 0")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"
    gain: float


@dataclass
class Leaf:
    weight: float


TreeNode = Union[Split, Leaf]


@dataclass
class GbtModel:
    params: GbtParams
    base_score: float
    feature_names: list
    trees: list = field(default_factory=list)
    gain_totals: Optional[np.ndarray] = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "format_version": FORMAT_VERSION,
                "params": self.params.to_dict(),
                "base_score": self.base_score,
                "feature_names": list(self.feature_names),
                "trees": [_node_to_dict(t) for t in self.trees],
                "gain_totals": list(self.gain_totals)
                if self.gain_totals is not None
                else None,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "GbtModel":
        d = json.loads(text)
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format_version {d.get('format_version')}")
        gain = d["gain_totals"]
        return cls(
            params=GbtParams(**d["params"]),
            base_score=d["base_score"],
            feature_names=d["feature_names"],
            trees=[_node_from_dict(t) for t in d["trees"]],
            gain_totals=np.asarray(gain, dtype=float) if gain is not None else None,
        )


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.weight}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "gain": node.gain,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if "leaf" in d:
        return Leaf(weight=d["leaf"])
    return Split(
        feature=d["feature"],
        threshold=d["threshold"],
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
        gain=d["gain"],
    )


def _best_split_in_chunk(X, g, h, G, H, sorted_idx, cols, lam, gamma, min_cw):
    """Best (gain, feature, threshold) over one feature chunk of a node.

    Exact greedy: every midpoint between consecutive distinct sorted values
    of every feature is a candidate. Ties resolve to the lowest feature
    index, then the lowest threshold (argmax over a feature-major layout
    returns the first maximum, which realizes exactly that order).
    ``sorted_idx`` carries the node's rows pre-sorted per feature.
    """
    idx = sorted_idx[cols]  # q x m row ids, value-sorted per feature
    m = idx.shape[1]
    Xs = X[idx, cols[:, None]]
    GL = np.cumsum(g[idx], axis=1)[:, :-1]
    HL = np.cumsum(h[idx], axis=1)[:, :-1]
    GR, HR = G - GL, H - HL
    gain = 0.5 * (GL**2 / (HL + lam) + GR**2 / (HR + lam) - G**2 / (H + lam)) - gamma
    valid = (Xs[:, 1:] > Xs[:, :-1]) & (HL >= min_cw) & (HR >= min_cw)
    gain[~valid] = -np.inf
    flat = gain.ravel()  # feature-major, threshold ascending within feature
    pos = int(np.argmax(flat))
    best_gain = flat[pos]
    if not np.isfinite(best_gain) or best_gain <= 0:
        return None
    row_local, split_pos = divmod(pos, m - 1)
    threshold = 0.5 * (Xs[row_local, split_pos] + Xs[row_local, split_pos + 1])
    if threshold <= Xs[row_local, split_pos]:  # guard midpoint rounding into the left value
        threshold = Xs[row_local, split_pos + 1]
    return float(best_gain), int(cols[row_local]), float(threshold)


def _find_split(X, g, h, sorted_idx, lam, gamma, min_cw, n_workers):
    # node totals computed once so chunking cannot perturb float rollup
    G, H = g[sorted_idx[0]].sum(), h[sorted_idx[0]].sum()
    chunks = np.array_split(np.arange(X.shape[1]), max(1, n_workers))
    best = None
    for cols in chunks:
        if len(cols) == 0:
            continue
        cand = _best_split_in_chunk(X, g, h, G, H, sorted_idx, cols, lam, gamma, min_cw)
        if cand is None:
            continue
        # deterministic reduce: higher gain wins; ties to lower feature, lower threshold
        if best is None or (-cand[0], cand[1], cand[2]) < (-best[0], best[1], best[2]):
            best = cand
    return best


def _grow_tree(X, g, h, params: GbtParams, gain_totals, n_workers, root_sorted=None) -> TreeNode:
    """Grow one tree; features are sorted once and the per-feature sorted
    row lists are partitioned down the tree instead of re-sorted."""
    lam = params.lambda_
    n = X.shape[0]
    if root_sorted is None:
        root_sorted = np.argsort(X, axis=0, kind="stable").T.copy()  # p x n

    def build(sorted_idx: np.ndarray, depth: int) -> TreeNode:
        rows = sorted_idx[0]
        gs, hs = g[rows].sum(), h[rows].sum()
        if depth >= params.max_depth or len(rows) < 2:
            return Leaf(weight=float(-gs / (hs + lam)))
        found = _find_split(
            X, g, h, sorted_idx, lam, params.gamma, params.min_child_weight, n_workers
        )
        if found is None:
            return Leaf(weight=float(-gs / (hs + lam)))
        gain, feat, thr = found
        gain_totals[feat] += gain
        left_global = np.zeros(n, dtype=bool)
        left_global[rows] = X[rows, feat] < thr
        goes_left = left_global[sorted_idx]  # p x m, order-preserving partition
        m_left = int(goes_left[0].sum())
        left_idx = sorted_idx[goes_left].reshape(sorted_idx.shape[0], m_left)
        right_idx = sorted_idx[~goes_left].reshape(sorted_idx.shape[0], -1)
        return Split(
            feature=feat,
            threshold=thr,
            left=build(left_idx, depth + 1),
            right=build(right_idx, depth + 1),
            gain=gain,
        )

    return build(root_sorted, 0)


def _tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        nd, rows = stack.pop()
        if isinstance(nd, Leaf):
            out[rows] = nd.weight
            continue
        left = X[rows, nd.feature] < nd.threshold
        stack.append((nd.left, rows[left]))
        stack.append((nd.right, rows[~left]))
    return out


def train(matrix: FeatureMatrix, params: GbtParams, n_workers: int = 1) -> GbtModel:
    """Fit the boosted ensemble; deterministic for a fixed seed and any n_workers."""
    X = np.ascontiguousarray(matrix.X, dtype=float)
    y = np.asarray(matrix.y, dtype=float)
    if X.size == 0 or len(y) == 0:
        raise EmptyMatrix("cannot train on an empty matrix")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteInput("matrix contains NaN or infinite values")

    base = float(y.mean())
    pred = np.full(len(y), base)
    rng = np.random.default_rng(params.seed)
    gain_totals = np.zeros(X.shape[1])
    trees = []
    full_sorted = None
    if params.subsample >= 1.0:
        # the presort is gradient-independent; reuse it across rounds
        full_sorted = np.argsort(X, axis=0, kind="stable").T.copy()
    for _ in range(params.n_trees):
        if params.subsample < 1.0:
            size = max(1, int(round(params.subsample * len(y))))
            rows = np.sort(rng.choice(len(y), size=size, replace=False))
        else:
            rows = np.arange(len(y))
        g = pred[rows] - y[rows]
        h = np.ones(len(rows))
        tree = _grow_tree(X[rows], g, h, params, gain_totals, n_workers, root_sorted=full_sorted)
        trees.append(tree)
        pred += params.learning_rate * _tree_predict(tree, X)

    return GbtModel(
        params=params,
        base_score=base,
        feature_names=list(matrix.spec.names),
        trees=trees,
        gain_totals=gain_totals,
    )


def predict(model: GbtModel, rows: np.ndarray, n_trees: Optional[int] = None) -> np.ndarray:
    """base_score + learning_rate * sum of tree outputs over the first n_trees."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != len(model.feature_names):
        raise WidthMismatch(
            f"expected {len(model.feature_names)} features, got {rows.shape[1]}"
        )
    use = model.trees if n_trees is None else model.trees[:n_trees]
    out = np.full(rows.shape[0], model.base_score)
    for tree in use:
        out += model.params.learning_rate * _tree_predict(tree, rows)
    return out


@dataclass
class ImportanceReport:
    entries: list  # [(feature name, normalized gain share)], descending

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.entries, columns=["feature", "gain_share"])


def importance(model: GbtModel, top: Optional[int] = None) -> ImportanceReport:
    """Gain-based feature importance, normalized to shares summing to 1."""
    if not model.trees:
        raise UntrainedModel("model has no trees")
    totals = model.gain_totals
    total = totals.sum()
    if total <= 0:
        return ImportanceReport(entries=[])
    shares = totals / total
    ranked = sorted(
        ((model.feature_names[i], float(shares[i])) for i in np.nonzero(shares)[0]),
        key=lambda e: (-e[1], e[0]),
    )
    if top is not None:
        ranked = ranked[:top]
    return ImportanceReport(entries=ranked)


def baseline_predict(table, t: int, dates: np.ndarray, wells: np.ndarray):
    """Copy-forward baseline: prediction(D, w) = actual oil(D - t, w).

    Returns (predictions, skipped) where skipped lists (date, well) keys
    whose t-day-prior actual is unobserved (their prediction is NaN).
    """
    frame = table.frame
    oil = {
        (d, w): v
        for d, w, v in zip(frame["date"], frame["well_name"], frame["oil_volume"])
        if not (isinstance(v, float) and np.isnan(v))
    }
    delta = np.timedelta64(t, "D")
    preds = np.empty(len(dates))
    skipped = []
    for i, (d, w) in enumerate(zip(dates, wells)):
        key = (pd.Timestamp(d - delta), w)
        if key in oil:
            preds[i] = oil[key]
        else:
            preds[i] = np.nan
            skipped.append((d, w))
    return preds, skipped

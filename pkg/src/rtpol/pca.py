"""Media-preference scores from a Boolean followership matrix.

The leading principal component of the accounts x media 0/1 matrix serves
as a one-dimensional media-preference axis. Loadings are oriented so that
a designated anchor column (a medium of known conservative leaning) gets a
positive loading; an account's projection onto the axis is its score, and
the sign of the score classifies it as left (negative) or right (positive).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AnchorError, ConvergenceError, DegenerateInputError, InputError
from .rng import generator

#: scores with absolute value below this band are reported as unclassified
ZERO_BAND = 1e-12


@dataclass(frozen=True, eq=False)
class FollowershipMatrix:
    """0/1 matrix of accounts (rows) against media columns.

    Every row must follow at least one medium; rows of zeros are expected
    to be dropped at ingest, before construction.
    """

    accounts: tuple[str, ...]
    media: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.uint8)
        object.__setattr__(self, "entries", ent)
        if ent.ndim != 2 or ent.shape != (len(self.accounts), len(self.media)):
            raise InputError("followership entries do not match account/media labels")
        if len(set(self.accounts)) != len(self.accounts):
            raise InputError("duplicate account ids in followership matrix")
        if len(set(self.media)) != len(self.media):
            raise InputError("duplicate media labels in followership matrix")
        if not np.isin(ent, (0, 1)).all():
            raise InputError("followership entries must be 0 or 1")
        if ent.shape[0] and ent.sum(axis=1).min() == 0:
            raise InputError("followership rows of all zeros must be dropped at ingest")

    @property
    def n_accounts(self) -> int:
        return len(self.accounts)


@dataclass(frozen=True, eq=False)
class MediaLoadings:
    """Unit-norm loadings of the leading principal component.

    `column_means` are the followership column means the loadings were
    computed against; scoring subtracts them so the projection is centered.
    """

    media: tuple[str, ...]
    loadings: np.ndarray
    column_means: np.ndarray
    anchor: str
    explained_variance: float


@dataclass(frozen=True, eq=False)
class MediaScores:
    """Signed media-preference score and class per account."""

    scores: dict[str, float]
    classes: dict[str, str]

    def class_of(self, account: str) -> str | None:
        return self.classes.get(account)


def _classify(score: float) -> str:
    if score < -ZERO_BAND:
        return "left"
    if score > ZERO_BAND:
        return "right"
    return "unclassified"


def first_principal_component(m: FollowershipMatrix, anchor: str,
                              tol: float = 1e-12,
                              max_iters: int = 100_000) -> MediaLoadings:
    """Leading eigenvector of the column-centered covariance, sign-anchored.

    The covariance uses divisor n_f - 1. The eigenvector is found by power
    iteration; a random restart guards against a start vector orthogonal to
    the leading eigenspace. Degenerate input (fewer than two rows, or all
    rows identical) is rejected.
    """
    if anchor not in m.media:
        raise InputError(f"anchor {anchor!r} is not a media column")
    n_f = m.n_accounts
    if n_f < 2:
        raise DegenerateInputError("followership needs at least two account rows")
    ent = m.entries.astype(np.float64)
    means = ent.mean(axis=0)
    x = ent - means
    if not x.any():
        raise DegenerateInputError("all followership rows are identical")
    cov = (x.T @ x) / (n_f - 1)
    if not cov.any():
        raise DegenerateInputError("followership covariance is zero")

    # fixed-seed random start: a deterministic ramp can land exactly in the
    # orthogonal complement of the leading eigenspace, a random one cannot
    n_media = len(m.media)
    restarts = generator(0x9E3779B9)
    v = restarts.standard_normal(n_media)
    v /= np.linalg.norm(v)
    residual = np.inf
    for _ in range(max_iters):
        u = cov @ v
        norm = np.linalg.norm(u)
        if norm < 1e-300:
            # start vector fell into the null space; try a random direction
            v = restarts.standard_normal(n_media)
            v /= np.linalg.norm(v)
            continue
        u /= norm
        residual = float(np.abs(u - v).max())
        v = u
        if residual < tol:
            break
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {max_iters} iterations",
            residual=residual, iterations=max_iters)

    lam = float(v @ cov @ v)
    a = float(v[m.media.index(anchor)])
    if abs(a) < ZERO_BAND:
        raise AnchorError(f"anchor {anchor!r} has a zero loading; cannot orient the axis")
    if a < 0:
        v = -v
    return MediaLoadings(media=m.media, loadings=v, column_means=means.copy(),
                         anchor=anchor, explained_variance=lam)


def score_accounts(m: FollowershipMatrix, loadings: MediaLoadings) -> MediaScores:
    """Project centered followership rows onto the loadings."""
    if tuple(m.media) != tuple(loadings.media):
        raise InputError("followership media columns do not match the loadings")
    proj = (m.entries.astype(np.float64) - loadings.column_means) @ loadings.loadings
    scores = {acct: float(s) for acct, s in zip(m.accounts, proj)}
    classes = {acct: _classify(s) for acct, s in scores.items()}
    return MediaScores(scores=scores, classes=classes)


def classify_counts(s: MediaScores) -> tuple[int, int, int]:
    """(n_left, n_right, n_unclassified) over all scored accounts."""
    n_left = sum(1 for c in s.classes.values() if c == "left")
    n_right = sum(1 for c in s.classes.values() if c == "right")
    return n_left, n_right, len(s.classes) - n_left - n_right


def node_score_array(scores: MediaScores, ids: Sequence[str]) -> np.ndarray:
    """Scores aligned to a node id sequence; NaN marks unscored nodes."""
    out = np.full(len(ids), np.nan)
    for i, ext in enumerate(ids):
        v = scores.scores.get(ext)
        if v is not None:
            out[i] = v
    return out

"""Labeled feature-vector datasets and the normalization they carry.

Feature normalization is per-feature min-max scaling fitted on the training
set; queries transformed through the same scaler are clamped to [0, 1] so
every encoded amplitude stays a valid rotation argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabeledSample:
    """One data point: normalized features in [0,1], a 1-based sector label,
    and the raw heterodyne outcome it came from."""

    features: np.ndarray
    label: int
    quadratures: tuple[float, float] | None = None


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature min-max record fitted on a training set."""

    minimum: np.ndarray
    maximum: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaler":
        return cls(minimum=features.min(axis=0), maximum=features.max(axis=0))

    def transform(self, features: np.ndarray) -> np.ndarray:
        span = self.maximum - self.minimum
        span = np.where(span > 0, span, 1.0)  # constant feature maps to 0
        scaled = (np.asarray(features, dtype=float) - self.minimum) / span
        return np.clip(scaled, 0.0, 1.0)

    def to_dict(self) -> dict:
        return {"minimum": self.minimum.tolist(), "maximum": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureScaler":
        return cls(np.asarray(data["minimum"], float), np.asarray(data["maximum"], float))


class TrainingSet:
    """Normalized training data for the classifiers.

    ``features`` is an (M, U) array with every entry in [0, 1]; ``labels``
    holds 1-based class labels. Raw (pre-normalization) features and raw
    quadratures are kept alongside for export.
    """

    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        n_classes: int,
        scaler: FeatureScaler,
        raw_features: np.ndarray | None = None,
        quadratures: np.ndarray | None = None,
    ):
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=int)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ValueError("features must be (M, U) with one label per row")
        if features.shape[0] < 1:
            raise ValueError("training set is empty")
        if features.min() < -1e-12 or features.max() > 1 + 1e-12:
            raise ValueError("normalized features must lie in [0, 1]")
        if labels.min() < 1 or labels.max() > n_classes:
            raise ValueError(f"labels must lie in 1..{n_classes}")
        self.features = np.clip(features, 0.0, 1.0)
        self.labels = labels
        self.n_classes = int(n_classes)
        self.scaler = scaler
        self.raw_features = raw_features
        self.quadratures = quadratures

    @classmethod
    def from_raw(
        cls,
        raw_features: np.ndarray,
        labels: np.ndarray,
        n_classes: int,
        quadratures: np.ndarray | None = None,
    ) -> "TrainingSet":
        raw = np.asarray(raw_features, dtype=float)
        scaler = FeatureScaler.fit(raw)
        return cls(
            features=scaler.transform(raw),
            labels=np.asarray(labels, dtype=int),
            n_classes=n_classes,
            scaler=scaler,
            raw_features=raw,
            quadratures=None if quadratures is None else np.asarray(quadratures, float),
        )

    @property
    def size(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def samples(self) -> list[LabeledSample]:
        quads = self.quadratures
        return [
            LabeledSample(
                features=self.features[j],
                label=int(self.labels[j]),
                quadratures=None if quads is None else (float(quads[j, 0]), float(quads[j, 1])),
            )
            for j in range(self.size)
        ]

    def normalize_queries(self, raw_features: np.ndarray) -> np.ndarray:
        """Scale query features with the training scaler, clamped to [0, 1]."""
        return self.scaler.transform(np.atleast_2d(np.asarray(raw_features, float)))

"""Mean-opinion-score user study: durable rating store and HTTP service."""

from .store import (
    DuplicateRatingError,
    MosResult,
    RatingRecord,
    RatingStore,
    StudyConfig,
    aggregate_mos,
    export_ratings,
    load_study_config,
)

__all__ = [
    "DuplicateRatingError",
    "MosResult",
    "RatingRecord",
    "RatingStore",
    "StudyConfig",
    "aggregate_mos",
    "export_ratings",
    "load_study_config",
]

"""Community structure and cascade virality in retweet networks."""

from .community import DETECTORS, DetectorConfig, detect, label_propagation, louvain, register_detector
from .errors import (ContractViolation, NotFoundError, ParseError, RetnetError,
                     UndefinedMeasureError, ValidationError)
from .graph import DigraphBuilder, Partition, WeightedDigraph, collapse, degrees, induced_subgraph
from .influence import (assign_strata, classify_viral, community_influence,
                        crosstab_tweets_by_users, virality)
from .ingest import InteractionRecord, TweetCascade, build_graph, read_records, stream_snapshots
from .metrics import mixture_coefficient, modularity, newman_modularity, nmi
from .sentiment import Lexicon, community_sentiment, community_word_frequencies
from .temporal import snapshot_stats

__version__ = "0.1.0"

__all__ = [
    "DETECTORS", "DetectorConfig", "detect", "label_propagation", "louvain", "register_detector",
    "ContractViolation", "NotFoundError", "ParseError", "RetnetError", "UndefinedMeasureError",
    "ValidationError", "DigraphBuilder", "Partition", "WeightedDigraph", "collapse", "degrees",
    "induced_subgraph", "assign_strata", "classify_viral", "community_influence",
    "crosstab_tweets_by_users", "virality", "InteractionRecord", "TweetCascade", "build_graph",
    "read_records", "stream_snapshots", "mixture_coefficient", "modularity", "newman_modularity",
    "nmi", "Lexicon", "community_sentiment", "community_word_frequencies", "snapshot_stats",
]

"""Medoid clustering for anomaly-based network intrusion detection."""

__version__ = "0.1.0"

from .clustering import (  # noqa: E402
    ClusterConfig,
    ClusteringResult,
    DistanceCache,
    KMeansResult,
    assign,
    cluster,
    cluster_mean,
    euclidean,
    kmeans_cluster,
    select_initial_medoids,
    update_medoids,
)
from .dataset import (  # noqa: E402
    ClassLabel,
    FeatureSchema,
    NumericDataset,
    RawRecord,
    encode_features,
    kdd_schema,
    load_taxonomy,
    map_label,
    parse_kdd_record,
    read_kdd_file,
    sample_dataset,
)
from .evaluation import (  # noqa: E402
    ConfusionMatrix,
    accuracy,
    confusion,
    detection_rate,
    false_alarm_rate,
    per_category_rates,
)
from .labeling import (  # noqa: E402
    classify_instances,
    label_clusters_majority,
    label_clusters_unsupervised,
)
from .preprocess import (  # noqa: E402
    StandardizationParams,
    apply_standardizer,
    fit_standardizer,
)

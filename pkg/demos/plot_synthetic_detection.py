"""
Small-cluster anomaly detection on synthetic blobs
==================================================

Two dense Gaussian groups stand in for normal traffic; 50 points drawn
uniformly from a cube in the gap between them are the anomalies. With three
clusters, the anomalies form their own small cluster and the size rule
(``size < alpha * n``) flags them.
"""

import numpy as np

from kmedoid_ids import ClassLabel, classify_instances, cluster, confusion, detection_rate
from kmedoid_ids import false_alarm_rate, kmeans_cluster, label_clusters_unsupervised
from kmedoid_ids.synthetic import make_blobs_with_outliers

X, is_outlier = make_blobs_with_outliers(seed=0)
truth = [ClassLabel("dos" if o else "normal", "synthetic") for o in is_outlier]

res = cluster(X, 3)
verdicts = label_clusters_unsupervised(res, alpha=0.06)
inst = classify_instances(verdicts, res)
cm = confusion(inst, truth)
print("cluster sizes:", res.cluster_sizes, "iterations:", res.iterations)
print(cm, "DR=%.3f FAR=%.4f" % (detection_rate(cm), false_alarm_rate(cm)))

# The loop only moves medoids within their current clusters, so the result
# depends on where the initial medoids land. Across fresh draws of the same
# construction some runs split a dense group instead of isolating the
# anomalies:
for seed in range(8):
    Xs, out = make_blobs_with_outliers(seed)
    r = cluster(Xs, 3)
    pred = classify_instances(label_clusters_unsupervised(r, 0.06), r).anomalous
    print(f"seed {seed}: sizes {sorted(r.cluster_sizes.tolist())}, "
          f"DR={(pred & out).sum() / out.sum():.2f}")

# K-means from the same initial rows, for comparison.
km = kmeans_cluster(X, 3)
pred = classify_instances(label_clusters_unsupervised(km, 0.06), km).anomalous
print("k-means sizes:", km.cluster_sizes, "DR=%.2f" % ((pred & is_outlier).sum() / 50))

# Standardizing with the mean absolute deviation shrinks the axis that
# separates the groups, which merges them in distance terms. That is why
# this fixture is clustered in its raw coordinates.

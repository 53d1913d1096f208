"""
Medoid clustering, one step at a time
=====================================

Walk through initialization, assignment and medoid update on a tiny
one-dimensional dataset, then let :func:`kmedoid_ids.cluster` run the loop.
"""

import numpy as np

from kmedoid_ids import DistanceCache, assign, cluster, select_initial_medoids, update_medoids

X = np.array([[0.0], [0.1], [0.2], [10.0], [10.1]])
cache = DistanceCache(X)

# Each object's initialization score is the sum of its distances to every
# other object, each divided by that other object's total distance. Objects
# in dense, central positions score lowest.
scores = cache.init_scores()
print("scores:", np.round(scores, 4))

medoids = select_initial_medoids(cache, 2)
print("initial medoids:", medoids)

labels, objective = assign(cache, medoids)
print("assignment:", labels, "objective:", round(objective, 4))

# Swap in the member with the smallest total distance inside each cluster.
medoids = update_medoids(cache, labels)
labels, objective = assign(cache, medoids)
print("after one update:", medoids, labels, round(objective, 4))

# The full loop repeats until the objective stops changing.
res = cluster(X, 2)
print("final medoids:", res.medoids, "sizes:", res.cluster_sizes)
print("objective trace:", [round(v, 4) for v in res.objective_trace])

# Duplicate points can starve a cluster; empty clusters are deleted.
res = cluster(np.zeros((4, 2)), 3)
print("identical points, c=3 ->", res.n_clusters, "cluster(s),", res.removed_empty, "removed")

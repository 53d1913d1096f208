"""Synthetic fixtures: Gaussian blobs with outliers, and KDD99-format records."""

from __future__ import annotations

import numpy as np

from .dataset import KDD_FEATURES, RawRecord

BLOB_SIZE = 475
OUTLIER_COUNT = 50


def make_blobs_with_outliers(seed: int = 0, n_per_blob: int = BLOB_SIZE,
                             n_outliers: int = OUTLIER_COUNT, sigma: float = 0.5,
                             separation: float = 10.0, dim: int = 5,
                             box_half_width: float = 1.0):
    """Two isotropic Gaussian blobs plus uniform outliers in the gap between them.

    Blob centres sit at the origin and at ``separation * e_0``. Outliers are
    drawn uniformly from an axis-aligned cube of half-width
    ``box_half_width`` centred on the midpoint of the two blob centres.

    Returns ``(X, is_outlier)``; blob rows come first.
    """
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, sigma, (n_per_blob, dim))
    b = rng.normal(0.0, sigma, (n_per_blob, dim))
    b[:, 0] += separation
    centre = np.zeros(dim)
    centre[0] = separation / 2
    outliers = rng.uniform(centre - box_half_width, centre + box_half_width, (n_outliers, dim))
    X = np.vstack([a, b, outliers])
    is_outlier = np.r_[np.zeros(2 * n_per_blob, dtype=bool), np.ones(n_outliers, dtype=bool)]
    return X, is_outlier


# raw label -> (protocol_type, candidate services, flag)
_PROFILES = {
    "normal": ("tcp", ("http", "smtp", "ftp_data", "domain_u"), "SF"),
    "smurf": ("icmp", ("ecr_i",), "SF"),
    "neptune": ("tcp", ("private", "telnet", "finger"), "S0"),
    "portsweep": ("tcp", ("private", "other"), "REJ"),
    "satan": ("tcp", ("other", "private"), "REJ"),
    "guess_passwd": ("tcp", ("telnet",), "SF"),
    "warezclient": ("tcp", ("ftp_data", "ftp"), "SF"),
    "buffer_overflow": ("tcp", ("telnet", "ftp_data"), "SF"),
    "rootkit": ("tcp", ("telnet",), "SF"),
}

DEFAULT_MIX = (
    ("normal", 900), ("smurf", 30), ("neptune", 20), ("portsweep", 15),
    ("satan", 10), ("guess_passwd", 8), ("warezclient", 7),
    ("buffer_overflow", 6), ("rootkit", 4),
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.2f}"
    return str(v)


def _record(rng, kind: str) -> RawRecord:
    proto, services, flag = _PROFILES[kind]
    f = dict.fromkeys(KDD_FEATURES, 0)
    f["protocol_type"] = proto
    f["service"] = services[rng.integers(len(services))]
    f["flag"] = flag
    rate = lambda lo, hi: float(np.clip(rng.uniform(lo, hi), 0, 1))  # noqa: E731
    if kind == "normal":
        f["duration"] = int(rng.exponential(2.0)) if rng.random() < 0.2 else 0
        f["src_bytes"] = int(rng.lognormal(5.5, 0.6))
        f["dst_bytes"] = int(rng.lognormal(7.5, 1.0))
        f["logged_in"] = 1
        f["count"] = int(rng.integers(1, 20))
        f["srv_count"] = f["count"] + int(rng.integers(0, 10))
        f["same_srv_rate"] = 1.0
        f["srv_diff_host_rate"] = rate(0.0, 0.2)
        f["dst_host_count"] = int(rng.integers(50, 255))
        f["dst_host_srv_count"] = 255
        f["dst_host_same_srv_rate"] = 1.0
        f["dst_host_same_src_port_rate"] = rate(0.0, 0.1)
    elif kind == "smurf":
        f["src_bytes"] = int(rng.choice([520, 1032]))
        f["count"] = 511
        f["srv_count"] = 511
        f["same_srv_rate"] = 1.0
        f["dst_host_count"] = 255
        f["dst_host_srv_count"] = 255
        f["dst_host_same_srv_rate"] = 1.0
        f["dst_host_same_src_port_rate"] = 1.0
    elif kind == "neptune":
        f["count"] = int(rng.integers(100, 300))
        f["srv_count"] = int(rng.integers(5, 25))
        f["serror_rate"] = 1.0
        f["srv_serror_rate"] = 1.0
        f["same_srv_rate"] = rate(0.02, 0.1)
        f["diff_srv_rate"] = rate(0.05, 0.08)
        f["dst_host_count"] = 255
        f["dst_host_srv_count"] = int(rng.integers(5, 25))
        f["dst_host_same_srv_rate"] = rate(0.02, 0.1)
        f["dst_host_diff_srv_rate"] = rate(0.05, 0.08)
        f["dst_host_serror_rate"] = 1.0
        f["dst_host_srv_serror_rate"] = 1.0
    elif kind in ("portsweep", "satan"):
        f["duration"] = int(rng.integers(0, 3))
        f["count"] = int(rng.integers(1, 5)) if kind == "portsweep" else int(rng.integers(50, 200))
        f["srv_count"] = int(rng.integers(1, 5))
        f["rerror_rate"] = 1.0
        f["srv_rerror_rate"] = 1.0
        f["diff_srv_rate"] = rate(0.5, 1.0) if kind == "satan" else 0.0
        f["dst_host_count"] = int(rng.integers(1, 255))
        f["dst_host_srv_count"] = int(rng.integers(1, 10))
        f["dst_host_diff_srv_rate"] = rate(0.5, 1.0)
        f["dst_host_rerror_rate"] = 1.0
        f["dst_host_srv_rerror_rate"] = rate(0.5, 1.0)
    elif kind == "guess_passwd":
        f["src_bytes"] = int(rng.integers(100, 130))
        f["dst_bytes"] = int(rng.integers(80, 200))
        f["num_failed_logins"] = 1
        f["count"] = 1
        f["srv_count"] = 1
        f["same_srv_rate"] = 1.0
        f["dst_host_count"] = int(rng.integers(1, 40))
        f["dst_host_srv_count"] = int(rng.integers(1, 40))
        f["dst_host_rerror_rate"] = rate(0.0, 0.5)
    elif kind == "warezclient":
        f["duration"] = int(rng.integers(100, 15000))
        f["src_bytes"] = int(rng.integers(300, 400000))
        f["hot"] = int(rng.integers(1, 28))
        f["logged_in"] = 1
        f["is_guest_login"] = 1
        f["count"] = int(rng.integers(1, 3))
        f["srv_count"] = int(rng.integers(1, 3))
        f["same_srv_rate"] = 1.0
        f["dst_host_count"] = int(rng.integers(1, 100))
        f["dst_host_srv_count"] = int(rng.integers(1, 100))
    else:  # buffer_overflow, rootkit
        f["duration"] = int(rng.integers(20, 300))
        f["src_bytes"] = int(rng.integers(1000, 3000))
        f["dst_bytes"] = int(rng.integers(1000, 8000))
        f["hot"] = int(rng.integers(1, 5))
        f["logged_in"] = 1
        f["num_compromised"] = int(rng.integers(0, 3))
        f["root_shell"] = 1
        f["num_file_creations"] = int(rng.integers(0, 3))
        f["num_shells"] = int(rng.integers(0, 2))
        f["num_access_files"] = int(rng.integers(0, 2))
        f["count"] = 1
        f["srv_count"] = 1
        f["same_srv_rate"] = 1.0
        f["dst_host_count"] = int(rng.integers(1, 20))
        f["dst_host_srv_count"] = int(rng.integers(1, 20))
    return RawRecord(tuple(_fmt(f[name]) for name in KDD_FEATURES), kind)


def make_kdd_records(mix=DEFAULT_MIX, seed: int = 0) -> list[RawRecord]:
    """KDD99-shaped records with crude per-attack feature profiles, shuffled."""
    rng = np.random.default_rng(seed)
    kinds = [kind for kind, count in mix for _ in range(count)]
    order = rng.permutation(len(kinds))
    return [_record(rng, kinds[i]) for i in order]


def write_kdd_file(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_line() + "\n")

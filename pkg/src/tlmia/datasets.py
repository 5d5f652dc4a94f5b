"""Synthetic tasks, membership partitions, shadow splits, and noise records.

Teacher and student tasks are Gaussian-cluster classification problems. Each
student class is a sub-cluster of a parent teacher class; a relatedness knob
in [0, 1] controls how far the student classes drift away from their parents
(1.0 means the student task is a pure refinement of the teacher task). All
generators are pure functions of their seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .serialize import format_float

# Geometry of the synthetic tasks. Teacher class centers are rescaled so that
# the closest pair sits TEACHER_SEPARATION apart. Student class centers orbit
# their parent teacher center at SUB_OFFSET_RADIUS along mutually orthogonal
# directions, plus a drift of (1 - relatedness) * DRIFT_RADIUS. Because
# SUB_OFFSET_RADIUS + DRIFT_RADIUS < TEACHER_SEPARATION / 2, every student
# class stays nearest to its own parent.
TEACHER_SEPARATION = 10.0
SUB_OFFSET_RADIUS = 2.5
DRIFT_RADIUS = 2.0

# Identifier namespaces. Task records count up from the id_start passed to the
# generator; noise records live far above so the two can never collide for any
# desk-scale dataset.
NOISE_ID_BASE = 1_000_000_000

_FORMAT_MAGIC = "mia-ds"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LabeledDataset:
    """A feature matrix with class labels and unique record identifiers."""

    inputs: np.ndarray
    labels: np.ndarray
    ids: np.ndarray
    num_classes: int

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        ids = np.asarray(self.ids, dtype=np.int64)
        if inputs.ndim != 2:
            raise ValidationError(f"inputs must be 2-D, got shape {inputs.shape}")
        n = inputs.shape[0]
        if labels.shape != (n,) or ids.shape != (n,):
            raise ValidationError(
                f"inputs/labels/ids lengths disagree: {n}, {labels.shape}, {ids.shape}"
            )
        if not np.isfinite(inputs).all():
            raise ValidationError("inputs contain non-finite values")
        if self.num_classes < 1:
            raise ValidationError("num_classes must be >= 1")
        if n > 0:
            if labels.min() < 0 or labels.max() >= self.num_classes:
                raise ValidationError("labels out of range for num_classes")
            if np.unique(ids).size != n:
                raise ValidationError("record ids are not unique")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ids", ids)

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def input_dim(self):
        return self.inputs.shape[1]

    def take(self, indices):
        """Return a new dataset holding the given row positions, in order."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            self.inputs[idx], self.labels[idx], self.ids[idx], self.num_classes
        )


@dataclass(frozen=True)
class MembershipSplit:
    """Disjoint member/non-member halves of a dataset.

    dropped_ids records any record discarded to make an odd-sized input
     1:1-partitionable.
    """

    member: LabeledDataset
    non_member: LabeledDataset
    dropped_ids: tuple = ()

    def __post_init__(self):
        overlap = set(self.member.ids.tolist()) & set(self.non_member.ids.tolist())
        if overlap:
            raise ValidationError(f"member/non-member ids overlap: {sorted(overlap)[:5]}")


@dataclass(frozen=True)
class TaskSpec:
    """Parameters of one teacher/student synthetic task pair."""

    input_dim: int
    teacher_classes: int
    student_classes: int
    teacher_samples_per_class: int
    student_samples_per_class: int
    cluster_spread: float
    relatedness: float
    seed: int

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValidationError("input_dim must be >= 1")
        if self.teacher_classes < 2 or self.student_classes < 2:
            raise ValidationError("class counts must be >= 2")
        if self.teacher_samples_per_class < 1 or self.student_samples_per_class < 1:
            raise ValidationError("samples_per_class must be >= 1")
        if not self.cluster_spread > 0:
            raise ValidationError("cluster_spread must be > 0")
        if not 0.0 <= self.relatedness <= 1.0:
            raise ValidationError("relatedness must lie in [0, 1]")
        per_parent = -(-self.student_classes // self.teacher_classes)
        if per_parent > self.input_dim:
            raise ValidationError(
                "input_dim too small for orthogonal student sub-offsets "
                f"({per_parent} student classes share one parent, dim {self.input_dim})"
            )


def _cluster_points(rng, center, spread, count):
    return center + spread * rng.normal(size=(count, center.shape[0]))


def generate_synthetic_task(spec, id_start=0):
    """Build one (teacher_data, student_data) pair from a TaskSpec.

    Teacher classes are Gaussian clusters with a guaranteed minimum center
    separation. Student class j descends from teacher class j mod C_t: its
    center is the parent center plus an orthogonal sub-offset, plus a drift
    that shrinks to zero as relatedness approaches 1. Record ids count up from
    id_start, teacher first, so the two datasets never share an id.
    """
    rng = np.random.default_rng(spec.seed)
    d = spec.input_dim
    c_t, c_s = spec.teacher_classes, spec.student_classes

    raw = rng.normal(size=(c_t, d))
    diffs = raw[:, None, :] - raw[None, :, :]
    pair_dist = np.sqrt((diffs**2).sum(axis=-1))
    min_dist = pair_dist[np.triu_indices(c_t, k=1)].min()
    if min_dist <= 0.0:
        raise ValidationError("degenerate teacher center draw (coincident centers)")
    teacher_centers = raw * (TEACHER_SEPARATION / min_dist)

    parents = np.arange(c_s) % c_t
    sub_offsets = np.zeros((c_s, d))
    for parent in range(c_t):
        members = np.flatnonzero(parents == parent)
        if members.size == 0:
            continue
        q, _ = np.linalg.qr(rng.normal(size=(d, members.size)))
        for col, j in enumerate(members):
            sub_offsets[j] = SUB_OFFSET_RADIUS * q[:, col]

    drifts = rng.normal(size=(c_s, d))
    drifts /= np.linalg.norm(drifts, axis=1, keepdims=True)
    student_centers = (
        teacher_centers[parents]
        + sub_offsets
        + (1.0 - spec.relatedness) * DRIFT_RADIUS * drifts
    )

    n_t = spec.teacher_samples_per_class
    teacher_inputs = np.vstack(
        [_cluster_points(rng, teacher_centers[c], spec.cluster_spread, n_t) for c in range(c_t)]
    )
    teacher_labels = np.repeat(np.arange(c_t), n_t)
    teacher_ids = id_start + np.arange(c_t * n_t)

    n_s = spec.student_samples_per_class
    student_inputs = np.vstack(
        [_cluster_points(rng, student_centers[c], spec.cluster_spread, n_s) for c in range(c_s)]
    )
    student_labels = np.repeat(np.arange(c_s), n_s)
    student_ids = id_start + c_t * n_t + np.arange(c_s * n_s)

    teacher_data = LabeledDataset(teacher_inputs, teacher_labels, teacher_ids, c_t)
    student_data = LabeledDataset(student_inputs, student_labels, student_ids, c_s)
    return teacher_data, student_data


def partition_member_nonmember(data, seed):
    """Split a dataset into disjoint member/non-member halves of equal size.

    The split is stratified per class (each side gets within one record of the
    class ideal). Odd-sized inputs drop one seeded-random record, reported in
    the split's dropped_ids.
    """
    n = len(data)
    if n < 2:
        raise ValidationError("need at least 2 records to partition")
    rng = np.random.default_rng(seed)
    indices = np.arange(n)
    dropped = ()
    if n % 2 == 1:
        victim = int(rng.integers(n))
        dropped = (int(data.ids[victim]),)
        indices = np.delete(indices, victim)

    member_idx, non_member_idx, leftovers = [], [], []
    for c in range(data.num_classes):
        cls = indices[data.labels[indices] == c]
        cls = rng.permutation(cls)
        half = len(cls) // 2
        member_idx.extend(cls[:half].tolist())
        non_member_idx.extend(cls[half : 2 * half].tolist())
        if len(cls) % 2 == 1:
            leftovers.append(int(cls[-1]))
    if leftovers:
        # n is even here, so the leftover count is even too and the halves
        # stay balanced.
        leftovers = rng.permutation(np.asarray(leftovers, dtype=np.int64)).tolist()
        for i, idx in enumerate(leftovers):
            (member_idx if i % 2 == 0 else non_member_idx).append(idx)

    return MembershipSplit(data.take(member_idx), data.take(non_member_idx), dropped)


def split_shadow(data, member_fraction, seed):
    """Split a shadow pool into member/non-member parts at the given fraction.

    The member side receives round(member_fraction * n) records (half-up).
    """
    if not 0.0 < member_fraction < 1.0:
        raise ValidationError("member_fraction must lie strictly between 0 and 1")
    n = len(data)
    n_member = int(np.floor(member_fraction * n + 0.5))
    if n_member < 1 or n - n_member < 1:
        raise ValidationError(
            f"split of {n} records at fraction {member_fraction} leaves a side empty"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return MembershipSplit(data.take(perm[:n_member]), data.take(perm[n_member:]))


def generate_noise_dataset(count, input_dim, low, high, seed):
    """Draw semantically empty records, i.i.d. uniform in [low, high].

    Labels are a sentinel class 0 (unused). Ids live in a reserved namespace
    above NOISE_ID_BASE, disjoint from task record ids.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    if input_dim < 1:
        raise ValidationError("input_dim must be >= 1")
    if not low < high:
        raise ValidationError(f"need low < high, got [{low}, {high}]")
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(low, high, size=(count, input_dim))
    labels = np.zeros(count, dtype=np.int64)
    ids = NOISE_ID_BASE + np.arange(count)
    return LabeledDataset(inputs, labels, ids, 1)


def save_dataset(data, path):
    """Write a dataset in the versioned header-plus-CSV file format.

    Line 1 is `mia-ds,1,<n>,<dim>,<num_classes>`; each following line is
    `id,label,f_1,...,f_dim` with floats at 17 significant digits. Loading the
    file back reproduces the dataset bit for bit.
    """
    n = len(data)
    lines = [f"{_FORMAT_MAGIC},{_FORMAT_VERSION},{n},{data.input_dim},{data.num_classes}"]
    for i in range(n):
        feats = ",".join(format_float(v) for v in data.inputs[i])
        lines.append(f"{int(data.ids[i])},{int(data.labels[i])},{feats}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path):
    """Read a dataset written by save_dataset."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip() != ""]
    if not lines:
        raise ValidationError(f"{path}: empty dataset file")
    header = lines[0].split(",")
    if len(header) != 5 or header[0] != _FORMAT_MAGIC:
        raise ValidationError(f"{path}: not a {_FORMAT_MAGIC} file")
    if int(header[1]) != _FORMAT_VERSION:
        raise ValidationError(f"{path}: unsupported format version {header[1]}")
    n, dim, num_classes = int(header[2]), int(header[3]), int(header[4])
    if len(lines) - 1 != n:
        raise ValidationError(f"{path}: header promises {n} rows, found {len(lines) - 1}")
    ids = np.empty(n, dtype=np.int64)
    labels = np.empty(n, dtype=np.int64)
    inputs = np.empty((n, dim))
    for i, line in enumerate(lines[1:]):
        fields = line.split(",")
        if len(fields) != 2 + dim:
            raise ValidationError(f"{path}: row {i} has {len(fields)} fields, expected {2 + dim}")
        ids[i] = int(fields[0])
        labels[i] = int(fields[1])
        inputs[i] = [float(v) for v in fields[2:]]
    return LabeledDataset(inputs, labels, ids, num_classes)

"""Independent brute-force reference implementations.

Everything here is written from the operation definitions alone, in the
dumbest way that could possibly work, and is kept free of imports from
the code under test (label strings and index arithmetic are restated
locally). Tests compare the real implementations against these.
"""

from __future__ import annotations

from dataclasses import dataclass

_CLASSES = [
    "ADE", "Dosage", "Drug", "Duration", "Form",
    "Frequency", "Reason", "Route", "Strength",
]
LABELS = ["O"]
for _cls in _CLASSES:
    LABELS.append("B-" + _cls)
    LABELS.append("I-" + _cls)

# Alphabetical over label strings, "O" forced last.
ALPHA_ORDER = sorted(LABELS, key=lambda s: (s == "O", s))


def oracle_chunk(words, max_len=128, soft_start=100, boundary="."):
    """Greedy scan: cut only while more than max_len words remain, at the
    first boundary in positions soft_start+1..max_len of the chunk."""
    chunks = []
    rest = list(words)
    while len(rest) > max_len:
        cut = None
        for pos in range(soft_start + 1, max_len + 1):
            if rest[pos - 1] == boundary:
                cut = pos
                break
        if cut is None:
            cut = max_len
        chunks.append(rest[:cut])
        rest = rest[cut:]
    if rest:
        chunks.append(rest)
    return chunks


def oracle_group_first(subword_logits):
    """subword_logits: list of logit lists for one word."""
    first = subword_logits[0]
    label = _lowest_argmax(first)
    return label, list(first)


def oracle_group_max(subword_logits):
    """Enumerate every (subword, label) pair; the maximal value wins,
    earlier subword then lower label on ties."""
    best = None  # (value, subword_idx, label_idx)
    for s, logits in enumerate(subword_logits):
        for l, value in enumerate(logits):
            if best is None or value > best[0]:
                best = (value, s, l)
    _, s, l = best
    return l, list(subword_logits[s])


def oracle_group_average(subword_logits):
    k = len(subword_logits)
    n = len(subword_logits[0])
    mean = []
    for j in range(n):
        total = 0.0
        for logits in subword_logits:
            total += logits[j]
        mean.append(total / k)
    return _lowest_argmax(mean), mean


def _lowest_argmax(values):
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def oracle_vote_majority_or_o(label_indices, threshold):
    """Count every one of the 19 labels; alphabetically-first qualifying
    label, else O."""
    for label in ALPHA_ORDER:
        idx = LABELS.index(label)
        if label_indices.count(idx) >= threshold:
            return idx
    return 0


def oracle_vote_max_alpha(label_indices):
    top = max(label_indices.count(i) for i in range(len(LABELS)))
    for label in ALPHA_ORDER:
        idx = LABELS.index(label)
        if label_indices.count(idx) == top:
            return idx
    raise AssertionError("unreachable")


def oracle_collapse(idx):
    if idx == 0:
        return 0
    return 1 + (idx - 1) // 2


@dataclass
class OracleReport:
    per_class: dict
    macro: tuple
    weighted: tuple
    accuracy: float


def oracle_report(gold, pred, collapsed=False, include_o_in_macro=True):
    """Counting from first principles, one full pass per class."""
    if collapsed:
        gold = [oracle_collapse(g) for g in gold]
        pred = [oracle_collapse(p) for p in pred]
        n_classes = 10
    else:
        n_classes = 19

    per_class = {}
    for c in range(n_classes):
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, pred) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, pred) if g == c and p != c)
        support = sum(1 for g in gold if g == c)
        predicted = sum(1 for p in pred if p == c)
        if support == 0 and predicted == 0:
            continue
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class[c] = (precision, recall, f1, support)

    macro_classes = [c for c in per_class if include_o_in_macro or c != 0]
    macro = tuple(
        sum(per_class[c][k] for c in macro_classes) / len(macro_classes)
        if macro_classes
        else 0.0
        for k in range(3)
    )
    total = sum(per_class[c][3] for c in per_class)
    weighted = tuple(
        sum(per_class[c][k] * per_class[c][3] for c in per_class) / total
        if total
        else 0.0
        for k in range(3)
    )
    accuracy = sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)
    return OracleReport(per_class=per_class, macro=macro, weighted=weighted, accuracy=accuracy)


def oracle_levenshtein(a, b):
    """Full-matrix DP, no row compression."""
    rows, cols = len(a) + 1, len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else 1),
            )
    return d[rows - 1][cols - 1]


def oracle_one_hot_blocks(features, labels_per_model, n_labels=19):
    """Check a one-hot feature row block by block; returns True iff every
    block m is exactly the indicator of labels_per_model[m]."""
    n_models = len(labels_per_model)
    if len(features) != n_models * n_labels:
        return False
    for m in range(n_models):
        block = features[m * n_labels : (m + 1) * n_labels]
        for j in range(n_labels):
            expected = 1.0 if j == labels_per_model[m] else 0.0
            if block[j] != expected:
                return False
    return True


def oracle_softmax_ce_linear_grads(w, b, x, y):
    """Closed-form gradients of -log softmax(Wx+b)[y] wrt W and b."""
    import math

    z = [sum(w[i][j] * x[j] for j in range(len(x))) + b[i] for i in range(len(b))]
    zmax = max(z)
    e = [math.exp(v - zmax) for v in z]
    total = sum(e)
    p = [v / total for v in e]
    db = [p[i] - (1.0 if i == y else 0.0) for i in range(len(b))]
    dw = [[db[i] * x[j] for j in range(len(x))] for i in range(len(b))]
    return dw, db

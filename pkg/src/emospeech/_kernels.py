"""Compiled numeric kernels: logistic gradient descent and tree induction.

These are the two hot loops of the toolkit — everything else is vectorized
numpy.  Both kernels are deterministic for fixed inputs and seeds.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def logistic_gd(features, targets, n_classes, max_iter, step, ridge, tol):
    """Full-batch gradient descent on mean ridge-regularized softmax NLL.

    ``features`` must already carry a bias column.  Returns the weight matrix
    (n_features, n_classes) after ``max_iter`` steps of size ``step``, or
    earlier once the gradient max-norm drops below ``tol``.
    """
    n, d = features.shape
    weights = np.zeros((d, n_classes))
    transposed = features.T.copy()
    for _ in range(max_iter):
        logits = features @ weights
        probs = np.empty((n, n_classes))
        for i in range(n):
            peak = logits[i, 0]
            for c in range(1, n_classes):
                if logits[i, c] > peak:
                    peak = logits[i, c]
            total = 0.0
            for c in range(n_classes):
                e = np.exp(logits[i, c] - peak)
                probs[i, c] = e
                total += e
            for c in range(n_classes):
                probs[i, c] /= total
        for i in range(n):
            probs[i, targets[i]] -= 1.0
        grad = (transposed @ probs) / n + 2.0 * ridge * weights
        grad_max = 0.0
        for a in range(d):
            for c in range(n_classes):
                g = abs(grad[a, c])
                if g > grad_max:
                    grad_max = g
        if grad_max < tol:
            break
        weights = weights - step * grad
    return weights


@njit(cache=True)
def _entropy(counts, total):
    h = 0.0
    for c in range(counts.shape[0]):
        if counts[c] > 0:
            p = counts[c] / total
            h -= p * np.log(p)
    return h


@njit(cache=True)
def grow_tree(features, labels, n_classes, k_features, max_depth, seed):
    """Induce a random tree over (n, d) features with int class labels.

    At each node ``k_features`` distinct features are drawn at random; the
    split is the midpoint threshold (between consecutive distinct sorted
    values) maximizing information gain, with ties resolved toward the
    earlier-drawn feature and the lower threshold.  Nodes stop splitting when
    pure, at ``max_depth``, below 2 records, or when no split has positive
    gain.  Returns parallel node arrays; feature -1 marks a leaf.
    """
    np.random.seed(seed)
    n, d = features.shape
    max_nodes = 2 * n + 1
    node_feature = np.full(max_nodes, -1, np.int64)
    node_threshold = np.zeros(max_nodes, np.float64)
    node_left = np.full(max_nodes, -1, np.int64)
    node_right = np.full(max_nodes, -1, np.int64)
    node_counts = np.zeros((max_nodes, n_classes), np.int64)

    order = np.arange(n)
    stack_node = np.empty(max_nodes, np.int64)
    stack_start = np.empty(max_nodes, np.int64)
    stack_end = np.empty(max_nodes, np.int64)
    stack_depth = np.empty(max_nodes, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    sp = 1
    n_nodes = 1

    perm = np.empty(d, np.int64)
    values = np.empty(n, np.float64)
    left_counts = np.empty(n_classes, np.int64)
    right_counts = np.empty(n_classes, np.int64)

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        start = stack_start[sp]
        end = stack_end[sp]
        depth = stack_depth[sp]
        m = end - start
        for i in range(start, end):
            node_counts[node, labels[order[i]]] += 1
        top = 0
        for c in range(n_classes):
            if node_counts[node, c] > top:
                top = node_counts[node, c]
        if m < 2 or depth >= max_depth or top == m:
            continue

        for j in range(d):
            perm[j] = j
        for j in range(k_features):
            pick = j + np.random.randint(0, d - j)
            swap = perm[j]
            perm[j] = perm[pick]
            perm[pick] = swap

        parent_h = _entropy(node_counts[node], float(m))
        best_gain = 0.0
        best_feature = -1
        best_threshold = 0.0
        for j in range(k_features):
            f = perm[j]
            for i in range(m):
                values[i] = features[order[start + i], f]
            ranks = np.argsort(values[:m])
            for c in range(n_classes):
                left_counts[c] = 0
                right_counts[c] = node_counts[node, c]
            for i in range(m - 1):
                lab = labels[order[start + ranks[i]]]
                left_counts[lab] += 1
                right_counts[lab] -= 1
                here = values[ranks[i]]
                after = values[ranks[i + 1]]
                if here != after:
                    nl = i + 1
                    nr = m - nl
                    child_h = (nl * _entropy(left_counts, float(nl))
                               + nr * _entropy(right_counts, float(nr))) / m
                    gain = parent_h - child_h
                    if gain > best_gain:
                        best_gain = gain
                        best_feature = f
                        best_threshold = 0.5 * (here + after)
        if best_feature < 0:
            continue

        scratch = np.empty(m, np.int64)
        nl = 0
        for i in range(m):
            if features[order[start + i], best_feature] <= best_threshold:
                scratch[nl] = order[start + i]
                nl += 1
        pos = nl
        for i in range(m):
            if features[order[start + i], best_feature] > best_threshold:
                scratch[pos] = order[start + i]
                pos += 1
        for i in range(m):
            order[start + i] = scratch[i]

        node_feature[node] = best_feature
        node_threshold[node] = best_threshold
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        node_left[node] = left_id
        node_right[node] = right_id
        stack_node[sp] = right_id
        stack_start[sp] = start + nl
        stack_end[sp] = end
        stack_depth[sp] = depth + 1
        sp += 1
        stack_node[sp] = left_id
        stack_start[sp] = start
        stack_end[sp] = start + nl
        stack_depth[sp] = depth + 1
        sp += 1

    return (node_feature[:n_nodes], node_threshold[:n_nodes],
            node_left[:n_nodes], node_right[:n_nodes], node_counts[:n_nodes])

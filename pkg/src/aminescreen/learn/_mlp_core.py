"""Compiled mini-batch SGD for a ReLU network with a single logistic output."""

import numpy as np
from numba import njit


@njit(cache=True)
def _offsets(sizes):
    n_layers = len(sizes) - 1
    w_off = np.zeros(n_layers + 1, dtype=np.int64)
    b_off = np.zeros(n_layers + 1, dtype=np.int64)
    total = 0
    for l in range(n_layers):
        w_off[l] = total
        total += sizes[l] * sizes[l + 1]
        b_off[l] = total
        total += sizes[l + 1]
    w_off[n_layers] = total
    return w_off, b_off, total


@njit(cache=True)
def init_params(sizes, seed):
    """Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out))."""
    np.random.seed(seed)
    w_off, b_off, total = _offsets(sizes)
    p = np.empty(total)
    for l in range(len(sizes) - 1):
        bound = np.sqrt(6.0 / (sizes[l] + sizes[l + 1]))
        for t in range(w_off[l], b_off[l] + sizes[l + 1]):
            p[t] = np.random.uniform(-bound, bound)
    return p


@njit(cache=True)
def forward(X, sizes, p):
    """Positive-class probability for each row."""
    w_off, b_off, _ = _offsets(sizes)
    A = X.copy()
    n_layers = len(sizes) - 1
    for l in range(n_layers):
        W = p[w_off[l]:w_off[l] + sizes[l] * sizes[l + 1]].reshape(sizes[l], sizes[l + 1])
        b = p[b_off[l]:b_off[l] + sizes[l + 1]]
        Z = np.dot(A, W) + b
        if l < n_layers - 1:
            A = np.maximum(Z, 0.0)
        else:
            A = 1.0 / (1.0 + np.exp(-Z))
    return A[:, 0]


@njit(cache=True)
def _batch_grad(Xb, yb, sizes, p, alpha, grad):
    """Fill grad with the batch gradient; return the batch loss."""
    w_off, b_off, _ = _offsets(sizes)
    n_layers = len(sizes) - 1
    m = Xb.shape[0]
    acts = [Xb]
    for l in range(n_layers):
        W = p[w_off[l]:w_off[l] + sizes[l] * sizes[l + 1]].reshape(sizes[l], sizes[l + 1])
        b = p[b_off[l]:b_off[l] + sizes[l + 1]]
        Z = np.dot(acts[l], W) + b
        if l < n_layers - 1:
            acts.append(np.maximum(Z, 0.0))
        else:
            acts.append(Z)
    z = acts[n_layers][:, 0]
    loss = 0.0
    delta = np.empty((m, 1))
    for i in range(m):
        zi = z[i]
        # log(1 + exp(-s z)) computed stably
        s = 1.0 if yb[i] == 1 else -1.0
        u = -s * zi
        if u > 0:
            loss += u + np.log1p(np.exp(-u))
        else:
            loss += np.log1p(np.exp(u))
        delta[i, 0] = 1.0 / (1.0 + np.exp(-zi)) - yb[i]
    loss /= m
    sq = 0.0
    for l in range(n_layers):
        for t in range(w_off[l], b_off[l]):
            sq += p[t] * p[t]
    loss += 0.5 * alpha * sq / m
    for l in range(n_layers - 1, -1, -1):
        W = p[w_off[l]:w_off[l] + sizes[l] * sizes[l + 1]].reshape(sizes[l], sizes[l + 1])
        gW = (np.dot(acts[l].T, delta) + alpha * W) / m
        gw_flat = gW.ravel()
        for t in range(sizes[l] * sizes[l + 1]):
            grad[w_off[l] + t] = gw_flat[t]
        for k in range(sizes[l + 1]):
            acc = 0.0
            for i in range(m):
                acc += delta[i, k]
            grad[b_off[l] + k] = acc / m
        if l > 0:
            delta = np.dot(delta, W.T) * (acts[l] > 0)
    return loss


@njit(cache=True)
def train(X, y, sizes, p, batch_size, lr_init, adaptive, alpha, max_epochs,
          tol, n_iter_no_change, momentum, seed):
    """SGD with Nesterov momentum; returns (params, loss curve, epochs run).

    A constant schedule stops once the epoch loss has failed to improve by
    ``tol`` for more than ``n_iter_no_change`` epochs.  The adaptive schedule
    instead divides the learning rate by 5 and stops when it drops to 1e-6.
    """
    np.random.seed(seed)
    n = X.shape[0]
    velocity = np.zeros_like(p)
    grad = np.zeros_like(p)
    losses = np.empty(max_epochs)
    lr = lr_init
    best = np.inf
    no_improve = 0
    epochs = 0
    bs = min(batch_size, n)
    for epoch in range(max_epochs):
        order = np.random.permutation(n)
        total = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            total += _batch_grad(X[idx], y[idx], sizes, p, alpha, grad) * len(idx)
            # Nesterov update in the reformulated form
            for t in range(len(p)):
                velocity[t] = momentum * velocity[t] - lr * grad[t]
                p[t] += momentum * velocity[t] - lr * grad[t]
        loss = total / n
        losses[epoch] = loss
        epochs = epoch + 1
        if loss > best - tol:
            no_improve += 1
        else:
            no_improve = 0
        if loss < best:
            best = loss
        if no_improve > n_iter_no_change:
            if adaptive and lr > 1e-6:
                lr /= 5.0
                no_improve = 0
                if lr <= 1e-6:
                    break
            else:
                break
    return p, losses[:epochs], epochs

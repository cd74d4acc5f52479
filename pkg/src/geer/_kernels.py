"""Compiled inner loops for walk sampling and frontier propagation.

Randomness comes from a counter-based SplitMix64 stream per walk: walk ``w``
of a batch with key ``k`` starts from mix(k + (w + 1) * GOLDEN) and advances
by GOLDEN per step. A walk's trajectory therefore depends only on
(key, w), so any partitioning of a batch yields identical samples.

Callers guarantee every node a walk can reach has degree >= 1.
"""
from __future__ import annotations

import numba as nb
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

_jit = nb.njit(cache=True, nogil=True)


@_jit
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@_jit
def _walk_state(key, w):
    return mix64(key + (np.uint64(w) + _ONE) * GOLDEN)


@_jit
def _step(indptr, indices, cur, state):
    state = state + GOLDEN
    u = (mix64(state) >> _S11) * _INV53
    start = indptr[cur]
    deg = indptr[cur + 1] - start
    off = np.int64(u * deg)
    if off >= deg:
        off = deg - 1
    return indices[start + off], state


@_jit
def uniforms(key, w, count):
    """First ``count`` uniforms of walk ``w``'s stream (exposed for tests)."""
    out = np.empty(count)
    state = _walk_state(key, w)
    for i in range(count):
        state = state + GOLDEN
        out[i] = (mix64(state) >> _S11) * _INV53
    return out


@_jit
def walk_paths(indptr, indices, origin, length, count, key, first=0):
    out = np.empty((count, length), dtype=np.int64)
    for w in range(count):
        state = _walk_state(key, first + w)
        cur = origin
        for i in range(length):
            cur, state = _step(indptr, indices, cur, state)
            out[w, i] = cur
    return out


@_jit
def walk_sums(indptr, indices, weights, origin, length, count, key, first=0):
    out = np.empty(count)
    for w in range(count):
        state = _walk_state(key, first + w)
        cur = origin
        acc = 0.0
        for _ in range(length):
            cur, state = _step(indptr, indices, cur, state)
            acc += weights[cur]
        out[w] = acc
    return out


@_jit
def sample_z(indptr, indices, weights, s, t, length, count, key_s, key_t, first=0):
    """Paired samples: walk sum from s minus walk sum from t."""
    out = np.empty(count)
    for w in range(count):
        state = _walk_state(key_s, first + w)
        cur = s
        acc = 0.0
        for _ in range(length):
            cur, state = _step(indptr, indices, cur, state)
            acc += weights[cur]
        state = _walk_state(key_t, first + w)
        cur = t
        for _ in range(length):
            cur, state = _step(indptr, indices, cur, state)
            acc -= weights[cur]
        out[w] = acc
    return out


@_jit
def endpoint_counts(indptr, indices, origin, length, count, key, s, t, first=0):
    at_s = 0
    at_t = 0
    for w in range(count):
        state = _walk_state(key, first + w)
        cur = origin
        for _ in range(length):
            cur, state = _step(indptr, indices, cur, state)
        if cur == s:
            at_s += 1
        if cur == t:
            at_t += 1
    return at_s, at_t


@_jit
def escape_excursions(indptr, indices, s, t, count, key, cap, first=0):
    """Excursions from s back to s; returns (#visiting t, #exceeding cap)."""
    hits = 0
    capped = 0
    for w in range(count):
        state = _walk_state(key, first + w)
        cur = s
        seen = False
        steps = 0
        while True:
            if steps >= cap:
                capped += 1
                seen = False
                break
            cur, state = _step(indptr, indices, cur, state)
            steps += 1
            if cur == t:
                seen = True
            elif cur == s:
                break
        if seen:
            hits += 1
    return hits, capped


@_jit
def edge_arrivals(indptr, indices, s, t, count, key, cap, first=0):
    """Walks from s until t; returns (#arriving through s -> t, #exceeding cap)."""
    via = 0
    capped = 0
    for w in range(count):
        state = _walk_state(key, first + w)
        cur = s
        steps = 0
        while True:
            if steps >= cap:
                capped += 1
                break
            prev = cur
            cur, state = _step(indptr, indices, cur, state)
            steps += 1
            if cur == t:
                if prev == s:
                    via += 1
                break
    return via, capped


@_jit
def push(indptr, indices, idx, val, scratch):
    """One forward step of a sparse distribution: y(u) = sum over v in N(u) of x(v)/d(v).

    ``scratch`` is a zeroed length-n buffer and is zeroed again on return.
    Output support is listed in first-touch order. Values must be positive.
    """
    vol = 0
    for k in range(idx.size):
        v = idx[k]
        vol += indptr[v + 1] - indptr[v]
    touched = np.empty(vol, dtype=np.int64)
    nt = 0
    for k in range(idx.size):
        v = idx[k]
        start = indptr[v]
        end = indptr[v + 1]
        share = val[k] / (end - start)
        for j in range(start, end):
            u = indices[j]
            if scratch[u] == 0.0:
                touched[nt] = u
                nt += 1
            scratch[u] += share
    out_idx = touched[:nt].copy()
    out_val = np.empty(nt)
    for k in range(nt):
        out_val[k] = scratch[out_idx[k]]
        scratch[out_idx[k]] = 0.0
    return out_idx, out_val


@_jit
def subkey(key, part):
    """Key of a child stream; matches one step of ``rng.stream_key``."""
    return mix64(key ^ mix64((np.uint64(part) + _ONE) * GOLDEN))


@_jit
def amc_batches(indptr, indices, weights, s, t, length, eta0, batch_lo, batch_hi,
                psi, log_term, target, key):
    """Run AMC batches [batch_lo, batch_hi) with batch b of size eta0 * 2**b.

    Batch b draws its source and target walks from subkey(subkey(key, 0), b)
    and subkey(subkey(key, 1), b). Stops after the first batch whose
    Bernstein radius is at most ``target``. Returns
    (stopped, last batch, mean, variance, radius, walks drawn).
    """
    key_s = subkey(key, 0)
    key_t = subkey(key, 1)
    mean = 0.0
    var = 0.0
    width = np.inf
    walks = 0
    last = batch_lo
    for b in range(batch_lo, batch_hi):
        last = b
        eta = eta0 << b
        ks = subkey(key_s, b)
        kt = subkey(key_t, b)
        acc = 0.0
        acc2 = 0.0
        for w in range(eta):
            state = _walk_state(ks, w)
            cur = s
            z = 0.0
            for _ in range(length):
                cur, state = _step(indptr, indices, cur, state)
                z += weights[cur]
            state = _walk_state(kt, w)
            cur = t
            for _ in range(length):
                cur, state = _step(indptr, indices, cur, state)
                z -= weights[cur]
            acc += z
            acc2 += z * z
        walks += 2 * eta
        mean = acc / eta
        var = max(0.0, acc2 / eta - mean * mean)
        width = np.sqrt(2.0 * var * log_term / eta) + 3.0 * psi * log_term / eta
        if width <= target:
            return True, last, mean, var, width, walks
    return False, last, mean, var, width, walks


@_jit
def _ceil_tol(x):
    r = np.floor(x + 0.5)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return np.int64(r)
    return np.int64(np.ceil(x))


@_jit
def _at(idx, val, v):
    for k in range(idx.size):
        if idx[k] == v:
            return val[k]
    return 0.0


@_jit
def _top_two_incoming(idx, val, degree, d_origin):
    a = 0.0
    b = 0.0
    for k in range(idx.size):
        x = val[k] * d_origin / degree[idx[k]]
        if x > a:
            b = a
            a = x
        elif x > b:
            b = x
    return a, b


@_jit
def _volume(idx, degree):
    vol = 0.0
    for k in range(idx.size):
        vol += degree[idx[k]]
    return vol


@_jit
def _term(ds, dt, s, t, idx_s, val_s, idx_t, val_t):
    return (_at(idx_s, val_s, s) / ds + _at(idx_t, val_t, t) / dt
            - _at(idx_s, val_s, t) / dt - _at(idx_t, val_t, s) / ds)


@_jit
def smm_step(indptr, indices, s, t, idx_s, val_s, idx_t, val_t, scratch):
    """Advance both iterates one step; returns them with the new series term."""
    idx_s, val_s = push(indptr, indices, idx_s, val_s, scratch)
    if s == t:
        idx_t, val_t = idx_s, val_s
    else:
        idx_t, val_t = push(indptr, indices, idx_t, val_t, scratch)
    ds = indptr[s + 1] - indptr[s]
    dt = indptr[t + 1] - indptr[t]
    return idx_s, val_s, idx_t, val_t, _term(ds, dt, s, t, idx_s, val_s, idx_t, val_t)


@_jit
def geer_iterations(indptr, indices, degree, s, t, ell, tau, log_hoeffding, epsilon, scratch):
    """Transition iterations from e_s and e_t while the frontier volume is at most h.

    Returns (r_b, ell_b, idx_s, val_s, idx_t, val_t) where the vectors are the
    forward iterates p_ell_b(s, .) and p_ell_b(t, .) on their supports.
    """
    ds = degree[s]
    dt = degree[t]
    idx_s = np.array([s], dtype=np.int64)
    val_s = np.ones(1)
    idx_t = np.array([t], dtype=np.int64)
    val_t = np.ones(1)
    r_b = 1.0 / ds + 1.0 / dt if s != t else 0.0
    ell_b = 0
    while ell_b < ell:
        remaining = ell - ell_b
        s1, s2 = _top_two_incoming(idx_s, val_s, degree, ds)
        t1, t2 = _top_two_incoming(idx_t, val_t, degree, dt)
        odd = 2 * ((remaining + 1) // 2)
        even = 2 * (remaining // 2)
        psi = odd * (s1 / ds + t1 / dt) + even * (s2 / ds + t2 / dt)
        eta_star = _ceil_tol(2.0 * psi * psi * log_hoeffding / (epsilon * epsilon))
        eta0 = max(1, _ceil_tol(eta_star / 2.0 ** (tau - 1)))
        h = ((1 << tau) - 1) * eta0
        if _volume(idx_s, degree) + _volume(idx_t, degree) > h:
            break
        idx_s, val_s = push(indptr, indices, idx_s, val_s, scratch)
        idx_t, val_t = push(indptr, indices, idx_t, val_t, scratch)
        r_b += _term(ds, dt, s, t, idx_s, val_s, idx_t, val_t)
        ell_b += 1
    return r_b, ell_b, idx_s, val_s, idx_t, val_t


def warm_up(indptr, indices, degree):
    """Load or compile every kernel for this graph's array types."""
    scratch = np.zeros(degree.size)
    weights = np.zeros(degree.size)
    idx = np.zeros(1, dtype=np.int64)
    key = np.uint64(0)
    push(indptr, indices, idx, np.ones(1), scratch)
    sample_z(indptr, indices, weights, 0, 0, 1, 1, key, key, 0)
    walk_sums(indptr, indices, weights, 0, 1, 1, key, 0)
    endpoint_counts(indptr, indices, 0, 1, 1, key, 0, 0, 0)
    escape_excursions(indptr, indices, 0, 0, 0, key, 1, 0)
    edge_arrivals(indptr, indices, 0, 0, 0, key, 1, 0)
    amc_batches(indptr, indices, weights, 0, 0, 1, 1, 0, 1, 0.0, 1.0, 1.0, key)
    geer_iterations(indptr, indices, degree, 0, 0, 0, 1, 1.0, 1.0, scratch)
    smm_step(indptr, indices, 0, 0, idx, np.ones(1), idx, np.ones(1), scratch)

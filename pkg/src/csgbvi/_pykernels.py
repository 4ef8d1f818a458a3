"""Pure-Python float Bellman sweep; mirrors ``_ckernels.pyx`` operation for operation."""

TOL = 1e-12


def matrix_game_value(z, m, n):
    """Value of the m x n game stored row-major in the flat list ``z``."""
    lo = max(min(z[i * n:(i + 1) * n]) for i in range(m))
    hi = min(max(z[i * n + j] for i in range(m)) for j in range(n))
    if hi - lo <= TOL:
        return lo
    shift = 1.0 - min(z)
    w = n + m + 1
    t = [0.0] * (m * w)
    for i in range(m):
        for j in range(n):
            t[i * w + j] = z[i * n + j] + shift
        t[i * w + n + i] = 1.0
        t[i * w + w - 1] = 1.0
    obj = [-1.0] * n + [0.0] * (m + 1)
    basis = [n + i for i in range(m)]
    while True:
        enter = -1
        for j in range(w - 1):
            if obj[j] < -TOL:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = 0.0
        for i in range(m):
            a = t[i * w + enter]
            if a > TOL:
                r = t[i * w + w - 1] / a
                if leave < 0 or r < best - TOL or (r <= best + TOL and basis[i] < basis[leave]):
                    best = r
                    leave = i
        if leave < 0:
            break
        p = t[leave * w + enter]
        for j in range(w):
            t[leave * w + j] /= p
        for i in range(m):
            if i != leave:
                f = t[i * w + enter]
                if f != 0.0:
                    for j in range(w):
                        t[i * w + j] -= f * t[leave * w + j]
        f = obj[enter]
        for j in range(w):
            obj[j] -= f * t[leave * w + j]
        basis[leave] = enter
    return 1.0 / obj[w - 1] - shift


def bellman_sweep(nr, nc, pair_ptr, entry_ptr, targets, probs, fixed, values, out):
    nr, nc, pair_ptr, entry_ptr = list(nr), list(nc), list(pair_ptr), list(entry_ptr)
    targets, probs, fixed, values = list(targets), list(probs), list(fixed), list(values)
    for s in range(len(nr)):
        if fixed[s]:
            out[s] = values[s]
            continue
        m, n = nr[s], nc[s]
        z = [0.0] * (m * n)
        base = pair_ptr[s]
        for k in range(m * n):
            p = base + k
            acc = 0.0
            for e in range(entry_ptr[p], entry_ptr[p + 1]):
                acc += probs[e] * values[targets[e]]
            z[k] = acc
        out[s] = matrix_game_value(z, m, n)
    return out

"""Pure numpy versions of the hot loops. Same signatures as ``_ckernels``."""

import numpy as np

OP_FLIP, OP_INC, OP_SWAP = 0, 1, 2


def classical_batch(ops, ctrl, states, radix):
    """Run a compiled classical program over a batch of basis states in place.

    ``ops`` rows are (opcode, t0, t1, p0, p1, ctrl_start, ctrl_count) and
    ``ctrl`` rows are (qudit, value). ``states`` has shape (batch, width).
    """
    if states.shape[0] == 0:
        return states
    for op, t0, t1, p0, p1, cs, cn in ops:
        mask = None
        for q, v in ctrl[cs:cs + cn]:
            m = states[:, q] == v
            mask = m if mask is None else (mask & m)
        if op == OP_SWAP:
            a = states[:, t0].copy()
            b = states[:, t1]
            if mask is None:
                states[:, t0] = b
                states[:, t1] = a
            else:
                states[mask, t0] = b[mask]
                states[mask, t1] = a[mask]
            continue
        col = states[:, t0]
        if op == OP_FLIP:
            hit_i = col == p0
            hit_j = col == p1
            if mask is not None:
                hit_i &= mask
                hit_j &= mask
            col[hit_i] = p1
            col[hit_j] = p0
        else:
            if mask is None:
                states[:, t0] = (col + p0) % radix
            else:
                col[mask] = (col[mask] + p0) % radix
    return states


def _kron_all(vectors):
    out = np.ones(1)
    for v in vectors:
        out = np.multiply.outer(out, v).reshape(-1)
    return out


def _apply_diagonals(psi, width, radix, scales):
    """Multiply psi by the tensor product of per-qudit diagonals in one pass."""
    half = width // 2
    left = _kron_all(scales[:half])
    right = _kron_all(scales[half:])
    psi.reshape(left.size, right.size)[...] *= left[:, None] * right[None, :]


def damp_idle(psi, width, radix, lam, uniforms):
    """One amplitude-damping draw per qudit, in place on a normalized state.

    ``lam[j]`` is the probability of decaying from level j to 0 (lam[0] = 0).
    Qudit q jumps from level j when ``uniforms[q]`` falls in the j-th slice of
    the cumulative jump probabilities sum_j lam[j] * pop_j / norm. A uniform
    at or above max(lam) can never select a jump, so those no-jump factors are
    deferred and applied together. Returns the Kraus index chosen per qudit
    (0 = no jump); the state leaves normalized.
    """
    d = radix
    out = np.zeros(width, dtype=np.int64)
    keep = np.sqrt(1.0 - lam)
    ones = np.ones(d)
    pending = [ones] * width
    dirty = False
    lam_max = lam.max()
    for q in range(width):
        u = uniforms[q]
        if u >= lam_max:
            pending[q] = keep
            dirty = True
            continue
        if dirty:
            _apply_diagonals(psi, width, d, pending)
            pending = [ones] * width
            dirty = False
        v = psi.reshape(d ** q, d, d ** (width - q - 1))
        pops = (v.real ** 2 + v.imag ** 2).sum(axis=(0, 2))
        total = pops.sum()
        acc = 0.0
        chosen = 0
        for j in range(1, d):
            acc += lam[j] * pops[j]
            if u * total < acc:
                chosen = j
                break
        out[q] = chosen
        if chosen:
            v[:, 0, :] = v[:, chosen, :] / np.sqrt(pops[chosen])
            v[:, 1:, :] = 0
        else:
            pending[q] = keep / np.sqrt(np.dot(pops, keep * keep) / total)
            dirty = True
    if dirty:
        _apply_diagonals(psi, width, d, pending)
    psi /= np.linalg.norm(psi)
    return out

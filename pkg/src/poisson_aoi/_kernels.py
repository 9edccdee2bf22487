"""numba slot loops shared by the isolated-queue and network simulators.

Slot order: (1) transmission of the head-of-line packet present at the start
of the slot, (2) deadline bookkeeping, (3) Bernoulli arrival at the end of the
slot, (4) age reset on delivery then +1. A packet arriving in slot t is
therefore first eligible for transmission in slot t+1.

Per-link state lives in an int64 array ``st`` of shape (n, NSTATE) and the
counters in ``acc`` (float64, shape (n, NACC)).
"""

import numpy as np
from numba import njit

# state columns
OCC, HEAD_ARR, WAIT_ARR, HEAD_SVC, WAIT_EL, AGE, ARR_PREV = range(7)
NSTATE = 7
# accumulator columns
(OFFERED, DELIVERED, DROP_FULL, DROP_DL, AGE_SUM, BUSY, SUCC, SLOTS,
 PSI_DEP, Y_SUM, Y2_SUM, Y_N, T_SUM, W_SUM, S_PSI_SUM, S_PSIBAR_SUM,
 OCC0, OCC1, OCC2, LAST_DEP) = range(20)
NACC = 20

POLICY_NONE, POLICY_A, POLICY_B = 0, 1, 2
MODE_ACTUAL, MODE_SYSTEM_A, MODE_SYSTEM_B = 0, 1, 2


@njit(cache=True)
def init_state(n):
    st = np.zeros((n, NSTATE), dtype=np.int64)
    acc = np.zeros((n, NACC), dtype=np.float64)
    for i in range(n):
        acc[i, LAST_DEP] = -1.0
    return st, acc


@njit(cache=True, inline="always")
def _advance(st, acc, i, t, success, u_arrival, lambda_a, policy, d, record, trace_age, trace_del):
    """Apply one slot to link i given its transmission outcome."""
    delivered_from = -1
    occ = st[i, OCC]
    if occ > 0:
        st[i, HEAD_SVC] += 1
        if record:
            acc[i, BUSY] += 1.0
        if success:
            delivered_from = st[i, HEAD_ARR]
            if record:
                acc[i, DELIVERED] += 1.0
                acc[i, SUCC] += 1.0
                svc = st[i, HEAD_SVC]
                tsys = t - st[i, HEAD_ARR]
                acc[i, T_SUM] += tsys
                acc[i, W_SUM] += tsys - svc
                if occ == 1:
                    acc[i, PSI_DEP] += 1.0
                    acc[i, S_PSI_SUM] += svc
                else:
                    acc[i, S_PSIBAR_SUM] += svc
                if acc[i, LAST_DEP] >= 0:
                    y = t - acc[i, LAST_DEP]
                    acc[i, Y_SUM] += y
                    acc[i, Y2_SUM] += y * y
                    acc[i, Y_N] += 1.0
            acc[i, LAST_DEP] = t
            if occ == 2:
                st[i, HEAD_ARR] = st[i, WAIT_ARR]
                st[i, HEAD_SVC] = 0
                st[i, OCC] = 1
            else:
                st[i, OCC] = 0
        elif policy == POLICY_B and st[i, HEAD_SVC] >= d:
            if record:
                acc[i, DROP_DL] += 1.0
            if occ == 2:
                st[i, HEAD_ARR] = st[i, WAIT_ARR]
                st[i, HEAD_SVC] = 0
                st[i, OCC] = 1
            else:
                st[i, OCC] = 0
        elif policy == POLICY_A and occ == 2:
            st[i, WAIT_EL] += 1
            if st[i, WAIT_EL] >= d:
                if record:
                    acc[i, DROP_DL] += 1.0
                st[i, OCC] = 1
    arrived = u_arrival < lambda_a
    st[i, ARR_PREV] = 1 if arrived else 0
    if arrived:
        if record:
            acc[i, OFFERED] += 1.0
        occ = st[i, OCC]
        if occ == 0:
            st[i, HEAD_ARR] = t
            st[i, HEAD_SVC] = 0
            st[i, OCC] = 1
        elif occ == 1:
            st[i, WAIT_ARR] = t
            st[i, WAIT_EL] = 0
            st[i, OCC] = 2
        elif record:
            acc[i, DROP_FULL] += 1.0
    if delivered_from >= 0:
        st[i, AGE] = t - delivered_from
    st[i, AGE] += 1
    if record:
        acc[i, AGE_SUM] += st[i, AGE]
        acc[i, SLOTS] += 1.0
        o = st[i, OCC]
        if o == 0:
            acc[i, OCC0] += 1.0
        elif o == 1:
            acc[i, OCC1] += 1.0
        else:
            acc[i, OCC2] += 1.0
    if trace_age.shape[0] > 0:
        trace_age[t] = st[i, AGE]
        trace_del[t] = 1 if delivered_from >= 0 else 0


@njit(cache=True, nogil=True)
def isolated_chunk(st, acc, t0, u_arr, u_srv, lambda_a, mu, policy, d, warmup, trace_age, trace_del):
    for k in range(u_arr.shape[0]):
        t = t0 + k
        success = st[0, OCC] > 0 and u_srv[k] < mu
        _advance(st, acc, 0, t, success, u_arr[k], lambda_a, policy, d, t >= warmup,
                 trace_age, trace_del)


@njit(cache=True, nogil=True)
def network_chunk(st, acc, t0, u_arr, u_sch, lambda_a, p, policy, d, warmup, mode,
                  nbr_ptr, nbr_idx, nbr_val, nbr_suf, fading_explicit, own_gain, theta,
                  exp_pool, pool_pos):
    """Advance every link over the slots of one chunk.

    ``nbr_val`` holds, per receiver and interferer, either the Rayleigh
    success factor 1/(1 + theta r0^a d^-a) (marginal fading) or the path gain
    d^-a (explicit fading). Neighbours are sorted by decreasing interference
    and ``nbr_suf[q]`` is the product of the success factors from q to the end
    of the row, so a marginal-fading link stops as soon as the outcome is
    decided either way.
    Returns (slots_done, pool_pos); fewer slots are done only when the
    explicit-fading pool would run out.
    """
    n = st.shape[0]
    active = np.zeros(n, dtype=np.bool_)
    success = np.zeros(n, dtype=np.bool_)
    no_age = np.zeros(0, dtype=np.int64)
    no_del = np.zeros(0, dtype=np.int8)
    nnz = nbr_idx.shape[0]
    for k in range(u_arr.shape[0]):
        t = t0 + k
        if fading_explicit and pool_pos + nnz + n > exp_pool.shape[0]:
            return k, pool_pos
        for j in range(n):
            sched = u_sch[k, j] < p
            if mode == MODE_ACTUAL:
                active[j] = sched and st[j, OCC] > 0
            elif mode == MODE_SYSTEM_A:
                active[j] = sched
            else:
                active[j] = sched and st[j, ARR_PREV] == 1
        for i in range(n):
            success[i] = False
            if st[i, OCC] == 0 or u_sch[k, i] >= p:
                continue
            if fading_explicit:
                signal = exp_pool[pool_pos] * own_gain
                pool_pos += 1
                interf = 0.0
                for q in range(nbr_ptr[i], nbr_ptr[i + 1]):
                    if active[nbr_idx[q]]:
                        interf += exp_pool[pool_pos] * nbr_val[q]
                        pool_pos += 1
                        if theta * interf >= signal:
                            break
                success[i] = signal > theta * interf
            else:
                v = u_sch[k, i] / p
                prob = 1.0
                ok = True
                for q in range(nbr_ptr[i], nbr_ptr[i + 1]):
                    if prob * nbr_suf[q] > v:
                        break
                    if active[nbr_idx[q]]:
                        prob *= nbr_val[q]
                        if prob <= v:
                            ok = False
                            break
                success[i] = ok and v < prob
        record = t >= warmup
        for i in range(n):
            _advance(st, acc, i, t, success[i], u_arr[k, i], lambda_a, policy, d, record,
                     no_age, no_del)
    return u_arr.shape[0], pool_pos


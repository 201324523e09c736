"""Hot numeric kernels: coefficient evaluation, the Dormand-Prince stepper and
the O(n^2) convolution quadratures.

Every function here operates on plain floats and float64 arrays so that it can
be compiled by numba.  With the numba backend disabled (see ``_accel``) the
stepper runs as ordinary Python and the quadratures switch to vectorised numpy
implementations.

Parameter layouts
-----------------
fam : ``[alpha, beta, shift, const]`` for ``p(t) = alpha*(t+shift)**-beta + const``
frc : ``[c, g, rate, omega]``, interpreted according to the forcing kind code
"""

import math

import numpy as np

from ._accel import USE_NUMBA, kernel

FORCE_ZERO = 0
FORCE_POWER = 1
FORCE_RESONANT = 2
FORCE_EXP = 3
FORCE_CONST = 4

MODE_FORCED = 0
MODE_UNDAMPED = 1
MODE_GREEN = 2

# channel layout of MODE_FORCED
N_FORCED = 13
IX, IDX, IY1, IY2, ILOGA, IU1, IV1, IU2, IV2, IUF, IVF, IIC, IIS = range(N_FORCED)

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2
STATUS_OVERFLOW = 3

LOGA_LIMIT = 300.0


# --------------------------------------------------------------------------
# coefficients
# --------------------------------------------------------------------------

@kernel
def p_at(t, fam):
    return fam[0] * (t + fam[2]) ** (-fam[1]) + fam[3]


@kernel
def dp_at(t, fam):
    return -fam[0] * fam[1] * (t + fam[2]) ** (-fam[1] - 1.0)


@kernel
def d2p_at(t, fam):
    return fam[0] * fam[1] * (fam[1] + 1.0) * (t + fam[2]) ** (-fam[1] - 2.0)


@kernel
def q_at(t, fam):
    p = p_at(t, fam)
    return -0.25 * p * p - 0.5 * dp_at(t, fam)


@kernel
def f_at(t, kind, frc):
    c = frc[0]
    if kind == FORCE_ZERO:
        return 0.0
    if kind == FORCE_POWER:
        return c * (1.0 + t) ** (-frc[1])
    if kind == FORCE_RESONANT:
        w = frc[3]
        g = frc[1]
        env = (1.0 + t) ** (-g)
        cw = math.cos(w * t)
        sw = math.sin(w * t)
        # f = y' + w^2 y for y = c cos(wt) (1+t)^-g
        return c * (-w * sw * env - g * cw * env / (1.0 + t) + w * w * cw * env)
    if kind == FORCE_EXP:
        return c * math.exp(-frc[2] * t)
    if kind == FORCE_CONST:
        return c
    return math.nan


# --------------------------------------------------------------------------
# right-hand sides
# --------------------------------------------------------------------------

@kernel
def rhs(mode, t, y, fam, fkind, frc, omega, out):
    w2 = omega * omega
    if mode == MODE_FORCED:
        p = p_at(t, fam)
        f = f_at(t, fkind, frc)
        hp = 0.5 * p
        cw = math.cos(omega * t)
        sw = math.sin(omega * t)
        out[0] = y[1]
        out[1] = f - p * y[1] - w2 * y[0]
        out[2] = -w2 * y[2] + f
        out[3] = -w2 * y[3] + y[2]
        out[4] = hp
        out[5] = cw * y[2] - hp * y[5]
        out[6] = sw * y[2] - hp * y[6]
        out[7] = cw * y[3] - hp * y[7]
        out[8] = sw * y[3] - hp * y[8]
        out[9] = cw * f - hp * y[9]
        out[10] = sw * f - hp * y[10]
        ay2 = math.exp(y[4]) * y[3]
        out[11] = cw * ay2
        out[12] = sw * ay2
    elif mode == MODE_UNDAMPED:
        q = q_at(t, fam)
        g = f_at(t, fkind, frc) * math.exp(y[2])
        out[0] = y[1]
        out[1] = g - (w2 + q) * y[0]
        out[2] = 0.5 * p_at(t, fam)
    else:
        # Green's function G(., s) and its s-derivative, both solve the
        # homogeneous transformed equation in t
        k = w2 + q_at(t, fam)
        out[0] = y[1]
        out[1] = -k * y[0]
        out[2] = y[3]
        out[3] = -k * y[2]


# --------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step control and continuous extension
# --------------------------------------------------------------------------

@kernel
def dopri5(mode, fam, fkind, frc, omega, y0, t_out, rtol, atol, h0, max_steps, loga_index):
    """Integrate from ``t_out[0]`` through every point of ``t_out``.

    Returns ``(Y, status, t_last, n_accepted, n_rejected)``; ``Y[j]`` is the
    state at ``t_out[j]``.
    """
    c2 = 0.2
    c3 = 0.3
    c4 = 0.8
    c5 = 8.0 / 9.0
    a21 = 0.2
    a31 = 3.0 / 40.0
    a32 = 9.0 / 40.0
    a41 = 44.0 / 45.0
    a42 = -56.0 / 15.0
    a43 = 32.0 / 9.0
    a51 = 19372.0 / 6561.0
    a52 = -25360.0 / 2187.0
    a53 = 64448.0 / 6561.0
    a54 = -212.0 / 729.0
    a61 = 9017.0 / 3168.0
    a62 = -355.0 / 33.0
    a63 = 46732.0 / 5247.0
    a64 = 49.0 / 176.0
    a65 = -5103.0 / 18656.0
    a71 = 35.0 / 384.0
    a73 = 500.0 / 1113.0
    a74 = 125.0 / 192.0
    a75 = -2187.0 / 6784.0
    a76 = 11.0 / 84.0
    e1 = 71.0 / 57600.0
    e3 = -71.0 / 16695.0
    e4 = 71.0 / 1920.0
    e5 = -17253.0 / 339200.0
    e6 = 22.0 / 525.0
    e7 = -1.0 / 40.0
    d1 = -12715105075.0 / 11282082432.0
    d3 = 87487479700.0 / 32700410799.0
    d4 = -10690763975.0 / 1880347072.0
    d5 = 701980252875.0 / 199316789632.0
    d6 = -1453857185.0 / 822651844.0
    d7 = 69997945.0 / 29380423.0

    beta = 0.04
    expo1 = 0.2 - beta * 0.75
    safe = 0.9
    facmax = 5.0
    facmin = 0.1

    n = y0.shape[0]
    nout = t_out.shape[0]
    Y = np.empty((nout, n))
    Y[0, :] = y0
    y = y0.copy()
    t = t_out[0]
    t_end = t_out[nout - 1]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    rhs(mode, t, y, fam, fkind, frc, omega, k1)

    h = h0
    facold = 1e-4
    rejected_last = False
    n_acc = 0
    n_rej = 0
    status = STATUS_OK
    j = 1
    while j < nout:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if h < 1e-14 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        last = False
        if t + 1.01 * h >= t_end:
            h = t_end - t
            last = True

        rhs(mode, t + c2 * h, y + h * (a21 * k1), fam, fkind, frc, omega, k2)
        rhs(mode, t + c3 * h, y + h * (a31 * k1 + a32 * k2), fam, fkind, frc, omega, k3)
        rhs(mode, t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), fam, fkind, frc, omega, k4)
        rhs(mode, t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
            fam, fkind, frc, omega, k5)
        ysti = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)
        rhs(mode, t + h, ysti, fam, fkind, frc, omega, k6)
        y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6)
        t_new = t_end if last else t + h
        rhs(mode, t_new, y1, fam, fkind, frc, omega, k7)

        errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)
        sk = atol + rtol * np.maximum(np.abs(y), np.abs(y1))
        err = math.sqrt(np.sum((errv / sk) ** 2) / n)

        if err <= 1.0:
            fac11 = err ** expo1
            fac = fac11 / facold ** beta
            fac = max(1.0 / facmax, min(1.0 / facmin, fac / safe))
            hnew = h / fac
            facold = max(err, 1e-4)

            if j < nout and t_out[j] <= t_new:
                r2 = y1 - y
                r3 = h * k1 - r2
                r4 = r2 - h * k7 - r3
                r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)
                while j < nout and t_out[j] <= t_new:
                    th = (t_out[j] - t) / h
                    th1 = 1.0 - th
                    Y[j, :] = y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))
                    j += 1
            y = y1
            t = t_new
            k1[:] = k7
            n_acc += 1
            if loga_index >= 0 and y[loga_index] > LOGA_LIMIT:
                status = STATUS_OVERFLOW
                break
            if rejected_last:
                hnew = min(hnew, h)
            rejected_last = False
            h = hnew
        else:
            fac11 = err ** expo1 if err == err else 1e300
            h = h / min(1.0 / facmin, fac11 / safe)
            rejected_last = True
            n_rej += 1
    return Y, status, t, n_acc, n_rej


# --------------------------------------------------------------------------
# quadrature helpers
# --------------------------------------------------------------------------

@kernel
def simpson_weights(m):
    """Composite Simpson weights (in units of h) for ``m`` uniform intervals.

    Odd ``m >= 3`` closes with the 3/8 rule on the last three intervals.
    """
    w = np.zeros(m + 1)
    if m == 0:
        return w
    if m == 1:
        w[0] = 0.5
        w[1] = 0.5
        return w
    ms = m if m % 2 == 0 else m - 3
    if ms > 0:
        w[0] += 1.0 / 3.0
        w[ms] += 1.0 / 3.0
        for i in range(1, ms):
            w[i] += 4.0 / 3.0 if i % 2 == 1 else 2.0 / 3.0
    if ms != m:
        w[ms] += 3.0 / 8.0
        w[ms + 1] += 9.0 / 8.0
        w[ms + 2] += 9.0 / 8.0
        w[ms + 3] += 3.0 / 8.0
    return w


# Gauss-Legendre 3-point rule on [0, 1]
GL3_NODES = np.array([0.5 - math.sqrt(15.0) / 10.0, 0.5, 0.5 + math.sqrt(15.0) / 10.0])
GL3_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@kernel
def _exp_filters_nb(t, s_nodes, wf_nodes, omega):
    # y1(t_i) = sum over nodes s < t_i of w f(s) e^{-w2 (t_i - s)}, y2 adds (t_i - s)
    n = t.shape[0]
    w2 = omega * omega
    y1 = np.zeros(n)
    y2 = np.zeros(n)
    for i in range(1, n):
        acc1 = 0.0
        acc2 = 0.0
        for k in range(3 * i):
            tau = t[i] - s_nodes[k]
            e = math.exp(-w2 * tau) * wf_nodes[k]
            acc1 += e
            acc2 += tau * e
        y1[i] = acc1
        y2[i] = acc2
    return y1, y2


def _exp_filters_np(t, s_nodes, wf_nodes, omega):
    n = t.shape[0]
    w2 = omega * omega
    y1 = np.zeros(n)
    y2 = np.zeros(n)
    for i in range(1, n):
        tau = t[i] - s_nodes[: 3 * i]
        e = np.exp(-w2 * tau) * wf_nodes[: 3 * i]
        y1[i] = e.sum()
        y2[i] = (tau * e).sum()
    return y1, y2


@kernel
def _k3_reconstruct_nb(t, x, px, dpx, omega, idx):
    w2 = omega * omega
    h = t[1] - t[0]
    out = np.zeros(idx.shape[0])
    for r in range(idx.shape[0]):
        i = idx[r]
        w = simpson_weights(i)
        acc = 0.0
        for j in range(i + 1):
            tau = t[i] - t[j]
            e = math.exp(-w2 * tau)
            hk = tau * e
            hk1 = (1.0 - w2 * tau) * e
            hk2 = (w2 * w2 * tau - 2.0 * w2) * e
            acc += w[j] * (hk2 + w2 * hk + hk1 * px[j] - hk * dpx[j]) * x[j]
        out[r] = x[i] + h * acc
    return out


def _k3_reconstruct_np(t, x, px, dpx, omega, idx):
    w2 = omega * omega
    h = t[1] - t[0]
    out = np.zeros(idx.shape[0])
    for r, i in enumerate(idx):
        tau = t[i] - t[: i + 1]
        e = np.exp(-w2 * tau)
        hk = tau * e
        hk1 = (1.0 - w2 * tau) * e
        hk2 = (w2 * w2 * tau - 2.0 * w2) * e
        g = (hk2 + w2 * hk + hk1 * px[: i + 1] - hk * dpx[: i + 1]) * x[: i + 1]
        out[r] = x[i] + h * np.dot(simpson_weights(i), g)
    return out


@kernel
def _l3_quadrature_nb(t, ay2, omega, idx):
    a = omega ** 3 - omega
    b = 2.0 * omega * omega
    h = t[1] - t[0]
    out = np.zeros(idx.shape[0])
    for r in range(idx.shape[0]):
        i = idx[r]
        w = simpson_weights(i)
        acc = 0.0
        for j in range(i + 1):
            tau = omega * (t[i] - t[j])
            acc += w[j] * (a * math.sin(tau) + b * math.cos(tau)) * ay2[j]
        out[r] = h * acc
    return out


def _l3_quadrature_np(t, ay2, omega, idx):
    a = omega ** 3 - omega
    b = 2.0 * omega * omega
    h = t[1] - t[0]
    out = np.zeros(idx.shape[0])
    for r, i in enumerate(idx):
        tau = omega * (t[i] - t[: i + 1])
        g = (a * np.sin(tau) + b * np.cos(tau)) * ay2[: i + 1]
        out[r] = h * np.dot(simpson_weights(i), g)
    return out


if USE_NUMBA:
    exp_filters = _exp_filters_nb
    k3_reconstruct = _k3_reconstruct_nb
    l3_quadrature = _l3_quadrature_nb
else:
    exp_filters = _exp_filters_np
    k3_reconstruct = _k3_reconstruct_np
    l3_quadrature = _l3_quadrature_np

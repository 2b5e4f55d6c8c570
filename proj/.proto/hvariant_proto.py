"""Generalized prototype: quotient + Benettin transverse MLE for selectable
coupling vector H. H variants indexed: 0 -> H=(0,x2) [paper-printed],
1 -> H=(x2,0), 2 -> H=(x1,0), 3 -> H=(0,x1).
Case (a) shifted quotient Qt=[[0,0.5],[1,0]]; target crossings:
M_a: 0.010 & 0.610, M_b: 0.005 & 2.610."""
import numpy as np
from numba import njit

@njit(cache=True, fastmath=True)
def hval(hv, x1, x2):
    # returns (h1, h2) = H(x)
    if hv == 0:
        return 0.0, x2
    elif hv == 1:
        return x2, 0.0
    elif hv == 2:
        return x1, 0.0
    else:
        return 0.0, x1

@njit(cache=True, fastmath=True)
def qrhs(s, sigma, Q, hv):
    a1, a2, b1, b2 = s
    ha1, ha2 = hval(hv, a1, a2)
    hb1, hb2 = hval(hv, b1, b2)
    d = np.empty(4)
    d[0] = a2 + sigma * (Q[0, 0] * ha1 + Q[0, 1] * hb1)
    d[1] = -a1 + 3.0 * (1.0 - a1 * a1) * a2 + sigma * (Q[0, 0] * ha2 + Q[0, 1] * hb2)
    d[2] = b2 + sigma * (Q[1, 0] * ha1 + Q[1, 1] * hb1)
    d[3] = -b1 + 3.0 * (1.0 - b1 * b1) * b2 + sigma * (Q[1, 0] * ha2 + Q[1, 1] * hb2)
    return d

@njit(cache=True, fastmath=True)
def settle(s0, sigma, Q, hv, dt, nsteps):
    s = s0.copy()
    for _ in range(nsteps):
        k1 = qrhs(s, sigma, Q, hv)
        k2 = qrhs(s + 0.5 * dt * k1, sigma, Q, hv)
        k3 = qrhs(s + 0.5 * dt * k2, sigma, Q, hv)
        k4 = qrhs(s + dt * k3, sigma, Q, hv)
        s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.abs(s).max() > 1e6:
            return s, False
    return s, True

@njit(cache=True, fastmath=True)
def vrhs(y, x1, x2, c, hv):
    # y' = [DF(x) + c*DH] y  (c = sigma*lambda, lambda negative)
    p = -1.0 - 6.0 * x1 * x2
    q = 3.0 * (1.0 - x1 * x1)
    d = np.empty(2)
    if hv == 0:
        d[0] = y[1]
        d[1] = p * y[0] + (q + c) * y[1]
    elif hv == 1:
        d[0] = (1.0 + c) * y[1]
        d[1] = p * y[0] + q * y[1]
    elif hv == 2:
        d[0] = c * y[0] + y[1]
        d[1] = p * y[0] + q * y[1]
    else:
        d[0] = y[1]
        d[1] = (p + c) * y[0] + q * y[1]
    return d

@njit(cache=True, fastmath=True)
def benettin_h(s0, lams, which, sigma, Q, hv, dt, horizon, transient, renorm):
    s = s0.copy()
    nt = lams.shape[0]
    ys = np.full((nt, 2), 1.0 / np.sqrt(2.0))
    sums = np.zeros(nt)
    steps = int(round(renorm / dt))
    nwin = int(round(horizon / renorm))
    skip = int(round(transient / renorm))
    for w in range(nwin):
        for _ in range(steps):
            k1 = qrhs(s, sigma, Q, hv)
            s2 = s + 0.5 * dt * k1
            k2 = qrhs(s2, sigma, Q, hv)
            s3 = s + 0.5 * dt * k2
            k3 = qrhs(s3, sigma, Q, hv)
            s4 = s + dt * k3
            k4 = qrhs(s4, sigma, Q, hv)
            for t in range(nt):
                c = sigma * lams[t]
                i0 = 2 * which[t]
                l1 = vrhs(ys[t], s[i0], s[i0 + 1], c, hv)
                l2 = vrhs(ys[t] + 0.5 * dt * l1, s2[i0], s2[i0 + 1], c, hv)
                l3 = vrhs(ys[t] + 0.5 * dt * l2, s3[i0], s3[i0 + 1], c, hv)
                l4 = vrhs(ys[t] + 0.5 * dt * l3, s4[i0], s4[i0 + 1], c, hv)
                ys[t] = ys[t] + (dt / 6.0) * (l1 + 2 * l2 + 2 * l3 + l4)
            s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        for t in range(nt):
            nrm = np.sqrt(ys[t, 0] ** 2 + ys[t, 1] ** 2)
            if w >= skip:
                sums[t] += np.log(nrm)
            ys[t] /= nrm
    mles = sums / ((nwin - skip) * renorm)
    return mles, s

def sweep(hv, Q, lams, which, sigmas, label, horizon=300.0, transient=60.0):
    print(f"--- {label} (hv={hv}) ---")
    s1, ok = settle(np.array([2.0, 0.0, 1.97, 0.11]), 0.0, Q, hv, 1e-3, 100000)
    state = np.array([s1[0], s1[1], s1[0], s1[1]])
    prev = None
    for sg in sigmas:
        state, ok = settle(state, sg, Q, hv, 1e-3, 100000)
        if not ok:
            print(f" s={sg:6.3f} QUOTIENT DIVERGED")
            return
        mles, state = benettin_h(state, lams, which, sg, Q, hv, 1e-3, horizon, transient, 1.0)
        Ma = max(m for m, w in zip(mles, which) if w == 0)
        Mb = max(m for m, w in zip(mles, which) if w == 1)
        flag = ""
        if prev is not None:
            pMa, pMb = prev
            if (pMa < 0) != (Ma < 0):
                flag += f"  <<< M_a crossing ({pMa:+.4f} -> {Ma:+.4f})"
            if (pMb < 0) != (Mb < 0):
                flag += f"  <<< M_b crossing ({pMb:+.4f} -> {Mb:+.4f})"
        print(f" s={sg:6.3f} Ma={Ma:+8.4f} Mb={Mb:+8.4f}{flag}")
        prev = (Ma, Mb)

if __name__ == "__main__":
    Qt = np.array([[0.0, 0.5], [1.0, 0.0]])
    lams = np.array([-8.763932, -12.763932, -13.236068, -16.0, -17.236068, -15.0])
    which = np.array([0, 0, 0, 0, 0, 1])
    lo = [0.002, 0.005, 0.008, 0.010, 0.013, 0.016, 0.020, 0.030, 0.050]
    hi = [0.1, 0.3, 0.5, 0.55, 0.6, 0.65, 0.7, 0.9, 1.3, 1.9, 2.3, 2.5, 2.6, 2.7, 2.9]
    sweep(1, Qt, lams, which, lo + hi, "case (a) shifted quotient, H=(x2,0)")

def run_case_bc():
    # case (b): wa=0.1, wb=3, wc=0.1 -> Qt = [[0.6-12, 0.5],[1, 12-12]]
    Qb = np.array([[-11.4, 0.5], [1.0, 0.0]])
    lams_b = np.array([-11.838, -12.040, -12.062, -12.200, -12.262, -15.0])
    which = np.array([0, 0, 0, 0, 0, 1])
    lo = [0.003, 0.006, 0.009, 0.012, 0.02, 0.05, 0.1, 0.14, 0.16, 0.18, 0.22]
    hi = [0.3, 0.5, 0.6, 0.66, 0.72, 0.9, 1.5, 2.5, 3.5, 3.8, 4.0, 4.2, 4.5]
    sweep(0, Qb, lams_b, which, lo + hi, "case (b): expect Ca [0.160,4.010], Cb [0.009,0.66]")
    # case (c): wa=0.1, wb=10, wc=0.1 -> Qt = [[-11.4, 0.5],[1, 40-12]]
    Qc = np.array([[-11.4, 0.5], [1.0, 28.0]])
    lams_c = np.array([-11.838, -12.040, -12.062, -12.200, -12.262, -22.0])
    lo2 = [0.002, 0.003, 0.004, 0.006, 0.01, 0.03, 0.06, 0.09, 0.10, 0.11, 0.13, 0.2, 0.26, 0.3]
    hi2 = [0.5, 1.0, 2.0, 3.0, 3.5, 3.8, 4.0, 4.3]
    sweep(0, Qc, lams_c, which, lo2 + hi2, "case (c): expect Ca [0.260,3.810], Cb [0.003,0.100]")

run_case_bc()

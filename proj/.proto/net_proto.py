"""Direct 15-node network simulation: cluster sync errors vs sigma."""
import numpy as np
from numba import njit

def build_A15(wa, wb, wc, kappa):
    A = np.zeros((15, 15))
    for i in range(10):
        for d in (1, 2, 3):
            j = (i + d) % 10
            A[i, j] = A[j, i] = wa
    for i in range(10, 15):
        for j in range(i + 1, 15):
            A[i, j] = A[j, i] = wb
    for i in range(10):
        for j in range(10, 15):
            A[i, j] = A[j, i] = wc
    return A - kappa * np.eye(15)

@njit(cache=True)
def rhs_net(x, At, sigma):
    n = At.shape[0]
    out = np.empty(2 * n)
    for i in range(n):
        x1 = x[2 * i]
        x2 = x[2 * i + 1]
        c = 0.0
        for j in range(n):
            c += At[i, j] * x[2 * j + 1]
        out[2 * i] = x2
        out[2 * i + 1] = -x1 + 3.0 * (1.0 - x1 * x1) * x2 + sigma * c
    return out

@njit(cache=True)
def run_net(x0, At, sigma, dt, tmax, w0, w1):
    x = x0.copy()
    n = At.shape[0]
    nsteps = int(round(tmax / dt))
    ea = 0.0
    eb = 0.0
    cnt = 0
    for s in range(nsteps):
        k1 = rhs_net(x, At, sigma)
        k2 = rhs_net(x + 0.5 * dt * k1, At, sigma)
        k3 = rhs_net(x + 0.5 * dt * k2, At, sigma)
        k4 = rhs_net(x + dt * k3, At, sigma)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.max(np.abs(x)) > 1e6:
            return np.nan, np.nan
        t = (s + 1) * dt
        if w0 <= t <= w1:
            sa = 0.0
            for i in range(1, 10):
                sa += np.sqrt((x[2 * i] - x[0]) ** 2 + (x[2 * i + 1] - x[1]) ** 2)
            sb = 0.0
            for i in range(11, 15):
                sb += np.sqrt((x[2 * i] - x[20]) ** 2 + (x[2 * i + 1] - x[21]) ** 2)
            ea += sa
            eb += sb
            cnt += 1
    return ea / cnt, eb / cnt

@njit(cache=True)
def rhs_q(s, Q, sigma):
    out = np.empty(4)
    a1, a2, b1, b2 = s
    out[0] = a2
    out[1] = -a1 + 3.0 * (1 - a1 * a1) * a2 + sigma * (Q[0, 0] * a2 + Q[0, 1] * b2)
    out[2] = b2
    out[3] = -b1 + 3.0 * (1 - b1 * b1) * b2 + sigma * (Q[1, 0] * a2 + Q[1, 1] * b2)
    return out

@njit(cache=True)
def run_q(s0, Q, sigma, dt, tmax):
    s = s0.copy()
    for _ in range(int(round(tmax / dt))):
        k1 = rhs_q(s, Q, sigma)
        k2 = rhs_q(s + 0.5 * dt * k1, Q, sigma)
        k3 = rhs_q(s + 0.5 * dt * k2, Q, sigma)
        k4 = rhs_q(s + dt * k3, Q, sigma)
        s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return s

if __name__ == "__main__":
    rng = np.random.default_rng(7)
    At = build_A15(2.0, 3.0, 0.1, 12.0)
    Q = np.array([[0.0, 0.5], [1.0, 0.0]])
    print("paper (a): Ca sync in [0.010,0.610], Cb in [0.005,2.610]")
    sq = run_q(np.array([2.0, 0.0, 1.9, 0.1]), Q, 0.005, 1e-3, 200.0)
    for sigma in [0.003, 0.03, 0.3, 0.7, 1.0, 2.0, 2.4, 3.0]:
        sq = run_q(sq, Q, sigma, 1e-3, 100.0)
        x0 = np.empty(30)
        for i in range(10):
            x0[2 * i] = sq[0]
            x0[2 * i + 1] = sq[1]
        for i in range(10, 15):
            x0[2 * i] = sq[2]
            x0[2 * i + 1] = sq[3]
        x0 += 1e-4 * rng.choice(np.array([-1.0, 1.0]), size=30)
        ea, eb = run_net(x0, At, sigma, 1e-3, 500.0, 450.0, 500.0)
        print(f"  sigma={sigma:6.3f}  E_a={ea:12.5g}  E_b={eb:12.5g}")

"""Probe quotient attractor branches and transverse MLE near sigma=0.61 (case a)."""
import numpy as np
from numba import njit
from msf_proto import rhs, rk4_state, benettin

@njit(cache=True)
def quotient_mle_and_amp(s0, Q, sigma, dt, horizon, transient, renorm):
    # Benettin on the full 4-dim quotient variational system + amplitude stats
    s = s0.copy()
    y = np.array([1.0, 0.0, 0.0, 0.0])
    ssum = 0.0
    nacc = 0
    steps = int(round(renorm / dt))
    nwin = int(round(horizon / renorm))
    skip = int(round(transient / renorm))
    amax = 0.0
    bmax = 0.0
    eps = 1e-7

    def vjac(s, y, sigma, Q):
        dy = np.empty(4)
        a1, a2, b1, b2 = s
        dy[0] = y[1]
        dy[1] = (-1 - 6 * a1 * a2) * y[0] + (3 * (1 - a1 * a1) + sigma * Q[0, 0]) * y[1] + sigma * Q[0, 1] * y[3]
        dy[2] = y[3]
        dy[3] = (-1 - 6 * b1 * b2) * y[2] + (3 * (1 - b1 * b1) + sigma * Q[1, 1]) * y[3] + sigma * Q[1, 0] * y[1]
        return dy

    for w in range(nwin):
        for _ in range(steps):
            k1 = rhs(s, sigma, Q); l1 = vjac(s, y, sigma, Q)
            k2 = rhs(s + 0.5 * dt * k1, sigma, Q); l2 = vjac(s + 0.5 * dt * k1, y + 0.5 * dt * l1, sigma, Q)
            k3 = rhs(s + 0.5 * dt * k2, sigma, Q); l3 = vjac(s + 0.5 * dt * k2, y + 0.5 * dt * l2, sigma, Q)
            k4 = rhs(s + dt * k3, sigma, Q); l4 = vjac(s + dt * k3, y + dt * l3, sigma, Q)
            s = s + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            y = y + (dt / 6) * (l1 + 2 * l2 + 2 * l3 + l4)
            if w >= skip:
                amax = max(amax, abs(s[0]))
                bmax = max(bmax, abs(s[2]))
        nrm = np.sqrt(np.sum(y * y))
        if w >= skip:
            ssum += np.log(nrm)
            nacc += 1
        y /= nrm
    return ssum / (nacc * renorm), amax, bmax, s

if __name__ == "__main__":
    Q = np.array([[0.0, 0.5], [1.0, 0.0]])
    mus = np.array([8.763932, 17.236068, 15.0])
    which = np.array([0, 0, 1])

    print("=== fine continuation sweep, step 0.005 ===")
    s1, _ = rk4_state(np.array([2.0, 0.0, 1.97, 0.11]), 0.0, Q, 1e-3, 100000)
    state = np.array([s1[0], s1[1], s1[0], s1[1]])
    sg = 0.005
    while sg <= 0.815:
        state, ok = rk4_state(state, sg, Q, 1e-3, 100000)  # settle 100
        qmle, amax, bmax, _ = quotient_mle_and_amp(state, Q, sg, 1e-3, 200.0, 50.0, 1.0)
        lams, state = benettin(state, mus, which, sg, Q, 1e-3, 200.0, 50.0, 1.0)
        if round(sg * 200) % 10 == 0 or 0.55 < sg < 0.75:
            print(f" s={sg:6.3f} qMLE={qmle:8.4f} amp_a={amax:7.3f} amp_b={bmax:7.3f} "
                  f"Ma={max(lams[0], lams[1]):8.4f} Mb={lams[2]:8.4f}")
        sg = round(sg + 0.005, 4)

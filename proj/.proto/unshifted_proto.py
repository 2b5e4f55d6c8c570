"""Test: does the UNSHIFTED quotient trajectory (Q = Z+ A Z, no -kappa)
reproduce the paper's printed sigma intervals?
Case (a): expect M_a crossings near 0.010 / 0.610, M_b near 0.005 / 2.610."""
import numpy as np
from msf_proto import rhs, rk4_state, benettin

def sweep(Q, mus, which, s_lo, s_hi, step, label):
    s1, _ = rk4_state(np.array([2.0, 0.0, 1.97, 0.11]), 0.0, Q, 1e-3, 100000)
    state = np.array([s1[0], s1[1], s1[0], s1[1]])
    prev = None
    sg = s_lo
    print(f"--- {label} ---")
    while sg <= s_hi + 1e-12:
        state, ok = rk4_state(state, sg, Q, 1e-3, 100000)
        if not ok:
            print(f" s={sg:6.3f} DIVERGED")
            return
        lams, state = benettin(state, mus, which, sg, Q, 1e-3, 300.0, 60.0, 1.0)
        Ma = max(l for l, w in zip(lams, which) if w == 0)
        Mb = max(l for l, w in zip(lams, which) if w == 1)
        if prev is not None:
            pMa, pMb = prev
            if (pMa < 0) != (Ma < 0):
                print(f"  >> M_a sign change in ({sg-step:.3f}, {sg:.3f}]: {pMa:+.4f} -> {Ma:+.4f}")
            if (pMb < 0) != (Mb < 0):
                print(f"  >> M_b sign change in ({sg-step:.3f}, {sg:.3f}]: {pMb:+.4f} -> {Mb:+.4f}")
        if round(sg * 1000) % 100 == 0:
            print(f" s={sg:6.3f} Ma={Ma:+8.4f} Mb={Mb:+8.4f}")
        prev = (Ma, Mb)
        sg = round(sg + step, 4)

if __name__ == "__main__":
    # case (a): wa=2, wb=3, wc=0.1  -> Q_unshifted = [[12, 0.5], [1, 12]]
    Qu = np.array([[12.0, 0.5], [1.0, 12.0]])
    mus = np.array([8.763932, 12.763932, 13.236068, 16.0, 17.236068, 15.0])
    which = np.array([0, 0, 0, 0, 0, 1])
    sweep(Qu, mus, which, 0.005, 0.75, 0.005, "case (a) unshifted, fine low range")
    sweep(Qu, mus, which, 0.8, 2.9, 0.1, "case (a) unshifted, coarse high range")

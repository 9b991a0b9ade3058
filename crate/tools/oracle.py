"""Independent reference values for the frozen regression tests.

Builds the bus Hamiltonians from scratch with numpy and propagates with
scipy's matrix exponential. Run with `python3 tools/oracle.py`; the printed
numbers are the constants in crates/core/tests/frozen.rs.
"""

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar


def dims(nq, cutoff):
    return 2**nq * (cutoff + 1)


def excited(index, k, nq, cutoff):
    mask = index // (cutoff + 1)
    return (mask >> (nq - 1 - k)) & 1 == 1


def hamiltonian(omega, qubits, cutoff, lab=False):
    """qubits: list of (Omega, lambda, eta)."""
    nq = len(qubits)
    d = dims(nq, cutoff)
    h = np.zeros((d, d), dtype=complex)
    for i in range(d):
        n = i % (cutoff + 1)
        rz = [(-1.0 if excited(i, k, nq, cutoff) else 1.0) for k in range(nq)]
        h[i, i] = omega * (n + 0.5) - 0.5 * sum(r * q[0] for r, q in zip(rz, qubits))
        for k, (_, lam, eta) in enumerate(qubits):
            if excited(i, k, nq, cutoff):
                continue
            up = i + (1 << (nq - 1 - k)) * (cutoff + 1)
            if n >= 1:
                h[up - 1, i] += lam * np.sqrt(n)
            if lab and n < cutoff:
                h[up + 1, i] += lam * np.sqrt(n + 1)
        if lab:
            for k, (_, lam, eta) in enumerate(qubits):
                if n < cutoff:
                    h[i + 1, i] += lam * np.tan(eta) * rz[k] * np.sqrt(n + 1)
    h = np.tril(h) + np.tril(h, -1).conj().T
    return h


def ket(nq, cutoff, exc, photons=0):
    mask = sum(1 << (nq - 1 - k) for k in exc)
    v = np.zeros(dims(nq, cutoff), dtype=complex)
    v[mask * (cutoff + 1) + photons] = 1
    return v


def run(omega, qubits, cutoff, segments, psi, lab=False, idle_on=True):
    for resonant, t in segments:
        cfg = []
        for k, (w, lam, eta) in enumerate(qubits):
            if k in resonant:
                cfg.append((omega, lam, eta))
            else:
                cfg.append((w, lam if idle_on else 0.0, eta))
        psi = expm(-1j * hamiltonian(omega, cfg, cutoff, lab) * t) @ psi
    return psi


def bell(omega, qubits, cutoff, lam, lab=False, idle_on=True):
    nq = len(qubits)
    segs = [([0], np.pi / (2 * lam)), ([0, 1], np.pi / (2 * np.sqrt(2) * lam))]
    out = run(omega, qubits, cutoff, segs, ket(nq, cutoff, [0]), lab, idle_on)
    a, b = ket(nq, cutoff, [1]), ket(nq, cutoff, [0])
    target = (a + b) / np.sqrt(2)
    fid = abs(np.vdot(target, out)) ** 2
    leak = 1 - abs(np.vdot(a, out)) ** 2 - abs(np.vdot(b, out)) ** 2
    return fid, leak


def w_raw(omega, qubits, cutoff, lam):
    nq = 3
    t1 = np.arccos(1 / np.sqrt(3)) / lam
    t2 = np.pi / (2 * np.sqrt(2) * lam)
    out = run(omega, qubits, cutoff, [([2], t1), ([0, 1], t2)], ket(nq, cutoff, [2]), idle_on=False)
    rel = np.exp(-1j * omega * np.pi / (2 * np.sqrt(2) * lam))
    s3 = 1 / np.sqrt(3)
    target = s3 * ket(nq, cutoff, [2]) - rel * s3 * ket(nq, cutoff, [1]) - rel * s3 * ket(nq, cutoff, [0])
    return abs(np.vdot(target, out)) ** 2


def phase_gate_block(omega, qubits, cutoff, lam, lab=False, idle_on=True):
    period = 2 * np.pi / lam
    segs = [([0], period), ([1], period), ([0], period)]
    basis = [ket(2, cutoff, e) for e in ([], [1], [0], [0, 1])]
    m = np.zeros((4, 4), dtype=complex)
    for c, b in enumerate(basis):
        out = run(omega, qubits, cutoff, segs, b, lab, idle_on)
        for r, br in enumerate(basis):
            m[r, c] = np.vdot(br, out)
    return m


def max_transfer(omega, lam, delta):
    h = hamiltonian(omega, [(omega + delta, lam, 0.0)], 2)
    e0, g1 = ket(1, 2, [0]), ket(1, 2, [], 1)
    w, v = np.linalg.eigh(h)
    c = v.conj().T @ e0

    def p(t):
        return abs(np.vdot(g1, v @ (np.exp(-1j * w * t) * c))) ** 2

    gap = np.sqrt(delta**2 + 4 * lam**2)
    ts = np.linspace(0, 2 * np.pi / gap, 4001)
    k = int(np.argmax([p(t) for t in ts]))
    r = minimize_scalar(lambda t: -p(t), bounds=(ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]), method="bounded",
                        options={"xatol": 1e-14})
    return max(-r.fun, p(ts[k]))


def main():
    np.set_printoptions(precision=17, legacy="1.25")
    defaults = [(1.3, None, 0.0), (1.6, None, 0.0), (1.9, None, 0.0)]
    print("lab-frame bell infidelity, cutoff 6, idle detuned")
    for lam in (1e-2, 10**-2.5, 1e-3):
        q = [(w, lam, e) for w, _, e in defaults]
        f, _ = bell(1.0, q, 6, lam, lab=True)
        print(f"  lambda={lam!r}: {1 - f!r}")
    print("rwa bell, Omega=(1.3,1.3,1.6), lambda=0.003, cutoff 4")
    q = [(1.3, 0.003, 0.0), (1.3, 0.003, 0.0), (1.6, 0.003, 0.0)]
    f, leak = bell(1.0, q, 4, 0.003)
    print(f"  fidelity={f!r} leakage={leak!r}")
    print("w raw fidelity, defaults, lambda=0.05")
    print(f"  {w_raw(1.0, [(w, 0.05, e) for w, _, e in defaults], 4, 0.05)!r}")
    print("phase gate block diagonal, rwa, detuned idle, omega=1, Omega=(1.3,1.6), lambda=0.047, cutoff 4")
    m = phase_gate_block(1.0, [(1.3, 0.047, 0.0), (1.6, 0.047, 0.0)], 4, 0.047)
    for k in range(4):
        print(f"  [{m[k, k].real!r}, {m[k, k].imag!r}]")
    print("dispersive maxima, omega=1, lambda=0.01")
    for r in (3.0, 10.0, 100.0):
        print(f"  ratio={r}: {max_transfer(1.0, 0.01, r * 0.01)!r}")


if __name__ == "__main__":
    main()

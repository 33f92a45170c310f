import numpy as np
import pytest

from ccorder.cca import DataMatrixPair


def random_pair(rng, n, m, M, shared=0, noise=1.0):
    """Complex pair with ``shared`` common latent components."""
    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    X = noise * cn(n, M)
    Y = noise * cn(m, M)
    if shared:
        S = cn(shared, M)
        X = X + cn(n, shared) @ S
        Y = Y + cn(m, shared) @ S
    return DataMatrixPair(X, Y)


def qr_canonical_correlations(X, Y):
    """Bjorck-Golub oracle: singular values of Q_x^H Q_y from QR of X^H, Y^H."""
    Qx, _ = np.linalg.qr(X.conj().T)
    Qy, _ = np.linalg.qr(Y.conj().T)
    return np.linalg.svd(Qx.conj().T @ Qy, compute_uv=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary --------------------------------------------------------------

ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Store and print one acceptance outcome; failing parts keep the criterion red."""
    prev_ok, prev = ACCEPTANCE.get(criterion, (True, ""))
    ACCEPTANCE[criterion] = (prev_ok and ok, f"{prev}; {detail}" if prev else detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}", flush=True)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key:>3}  {detail}")

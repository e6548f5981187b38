import numpy as np
import pytest

from softgrasp import GraspConfig

_ACCEPTANCE = []


def record_acceptance(number, description, passed, detail=""):
    _ACCEPTANCE.append((number, description, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number:>2}. {description}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def worked():
    """Worked example grasp: f_p = 20 N against a 15 N threshold."""
    return GraspConfig(k_n=1000, k_t=500, delta_n=0.02, r=0.03, inertia=1e-4, mu=0.6)


@pytest.fixture
def worked_stable(worked):
    return worked.with_preload(10.0)


def random_config(rng, *, kn_gt_kt=True, rest=False, mu=None):
    """Draw a plausible fingertip grasp.

    With ``rest=True`` the preload is placed where a non-trivial rest angle
    exists (cosine ratio within (-0.95, 0.95)).
    """
    k_n = rng.uniform(200, 3000)
    k_t = rng.uniform(0.05, 0.95) * k_n if kn_gt_kt else rng.uniform(0.05, 3.0) * k_n
    r = rng.uniform(0.01, 0.05)
    inertia = rng.uniform(1e-5, 5e-4)
    mu = rng.uniform(0.2, 1.2) if mu is None else mu
    if rest:
        # keep f_p >= 0 when k_t > 2 k_n
        lo = -0.95 if k_t <= k_n else max(-0.95, -0.95 * k_n / (k_t - k_n))
        ratio = rng.uniform(lo, 0.95)
        f_p = k_n * r + ratio * (k_t * r - k_n * r)
    else:
        f_p = rng.uniform(0.1, 2.0) * k_t * r
    return GraspConfig(k_n=k_n, k_t=k_t, delta_n=f_p / k_n, r=r, inertia=inertia, mu=mu)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

import numpy as np
import pytest


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Trigger JIT compilation of the hot kernels on tiny inputs once, so
    per-test runtime budgets measure steady-state work, not compilation."""
    from beta_tails import ensembles, lpp, stats, tridiag
    from beta_tails.core_rand import make_stream

    s = make_stream(0, 0)
    spec = ensembles.hermite_spec(2.0, 4)
    diags, offs = ensembles.hermite_batch(spec, s, 2)
    tridiag.sturm_count_batch(diags, offs, 0.0)
    f = lpp.WeightField(0)
    lpp.passage_p2p(f, (0, 0), (2, 2))
    lpp.passage_p2l(f, (0, 0), 4)
    lpp.passage_l2p(f, 0, (2, 2))
    lpp.geodesic(f, (0, 0), (2, 2))
    lpp.diagonal_passage_profile(f, 4)
    lpp.p2l_passage_profile(f, 4)
    lpp.l2p_passage_profile(f, 4)
    fh = lpp.WeightField(0, half_space=True)
    lpp.passage_halfspace(fh, (0, 0), (2, 2))
    stats.lpp_value_sample(3, 2, 0)
    stats.mc_tail(stats.LppTailSpec(6), "right", [1.0], 100)
    stats.mc_tail(spec, "right", [1.0], 100)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from _criterion_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)

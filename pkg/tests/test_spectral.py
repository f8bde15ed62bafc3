import math
import warnings

import numpy as np
import pytest

from liftlab.errors import DegenerateSpectrum, InvalidInput, NotConvergent
from liftlab.graphs import build_cycle, factor_graph
from liftlab.operators import AdmmParams, build_T_A, build_T_G
from liftlab.spectral import convergence_rate, convergence_time, spectrum, spectrum_report


def test_spectrum_sorted_by_modulus():
    M = np.diag([0.1, -0.9, 0.5, 1.0])
    ev = spectrum(M)
    assert np.allclose(np.abs(ev), [1.0, 0.9, 0.5, 0.1])


def test_spectrum_rotation_is_complex_pair():
    c, s = np.cos(0.3), np.sin(0.3)
    ev = spectrum(0.8 * np.array([[c, -s], [s, c]]))
    assert np.allclose(np.abs(ev), 0.8)
    assert np.isclose(ev[0], np.conj(ev[1]))


def test_spectrum_rejects_non_square():
    with pytest.raises(InvalidInput):
        spectrum(np.zeros((2, 3)))


@pytest.mark.parametrize("diag, tau", [
    ([1.0, 0.5, -0.7], 0.7),
    ([1.0, 1.0, 0.2], 0.2),
    ([1.0, 0.0], 0.0),
    ([1.0, 1.2, 0.3], math.inf),
    ([-1.0 - 1e-6, 0.3], math.inf),
])
def test_convergence_rate_diagonal(diag, tau):
    assert convergence_rate(np.diag(diag)) == tau


def test_all_unit_spectrum_is_degenerate():
    with pytest.raises(DegenerateSpectrum):
        convergence_rate(np.eye(3))
    with pytest.raises(DegenerateSpectrum):
        convergence_rate(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_near_unit_eigenvalue_counts_as_unit():
    assert convergence_rate(np.diag([1.0 - 1e-12, 0.4])) == 0.4


def test_rate_matches_T_G_closed_form_on_c4():
    fg = factor_graph(build_cycle(4))
    # Laplacian spectrum of C4 is {0, 2, 2, 4}
    for alpha in (0.1, 0.2, 1 / 3):
        tau = convergence_rate(build_T_G(fg, None, alpha))
        assert np.isclose(tau, max(abs(1 - 2 * alpha), abs(1 - 4 * alpha)), atol=1e-12)


def test_rate_of_T_A_is_below_one_inside_parameter_range():
    fg = factor_graph(build_cycle(8))
    for gamma in (0.5, 1.0, 1.5):
        tau = convergence_rate(build_T_A(fg, None, AdmmParams.uniform(fg, gamma, 1.0)))
        assert 0 < tau < 1


@pytest.mark.parametrize("tau", [0.1, 0.5, 0.9, 0.999])
def test_convergence_time_forms(tau):
    ct = convergence_time(tau, C=2.0)
    assert np.isclose(ct.exact, 2.0 / math.log(1 / tau))
    assert np.isclose(ct.approx, 2.0 / (1 - tau))
    assert np.isclose(ct.R, 1 / (1 - tau))


def test_convergence_time_first_order_agreement_near_one():
    ct = convergence_time(1 - 1e-4)
    assert abs(ct.exact - ct.approx) / ct.approx < 1e-4


def test_convergence_time_zero_rate():
    ct = convergence_time(0.0)
    assert ct.exact == 0.0 and ct.R == 1.0


@pytest.mark.parametrize("tau", [-0.1, 1.0, 1.5, math.inf])
def test_convergence_time_rejects(tau):
    with pytest.raises(NotConvergent):
        convergence_time(tau)


def test_spectrum_report_fields():
    rep = spectrum_report(np.diag([1.0, 0.5, 0.25]))
    assert rep.unit_count == 1
    assert rep.tau == 0.5 and rep.convergence_time == 2.0
    assert not rep.diverged
    d = rep.to_dict()
    assert d["tau"] == 0.5 and len(d["eigenvalues"]) == 3


def test_spectrum_report_diverged():
    rep = spectrum_report(np.diag([1.0, 1.5]))
    assert rep.diverged and rep.convergence_time == math.inf
    assert rep.spectral_radius == 1.5


def test_spectrum_report_warns_on_extra_unit_eigenvalues():
    with pytest.warns(RuntimeWarning):
        spectrum_report(np.diag([1.0, 1.0, 0.5]))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spectrum_report(np.diag([1.0, 1.0, 0.5]), consensus_dim=2)

"""One test per acceptance criterion, each at its stated tolerance and runtime budget."""
import pytest

from crackmodes import acceptance


@pytest.fixture(scope="module")
def sweep_2d():
    return acceptance.criterion_2d_exponents()


def check(result, log):
    line = result.line()
    print(line)
    log.append(line)
    assert result.passed, result.values
    assert result.runtime_s <= result.budget_s


def test_criterion_1_threshold(acceptance_log):
    check(acceptance.criterion_threshold(), acceptance_log)


def test_criterion_2_determinant(acceptance_log):
    check(acceptance.criterion_determinant(seed=0), acceptance_log)


def test_criterion_3_symbol(acceptance_log):
    check(acceptance.criterion_symbol(seed=0), acceptance_log)


def test_criterion_4_inverse_values(acceptance_log):
    check(acceptance.criterion_inverse_values(), acceptance_log)


def test_criterion_5_2d_exponents(sweep_2d, acceptance_log):
    check(sweep_2d, acceptance_log)


def test_criterion_6_2d_prefactor(sweep_2d, acceptance_log):
    check(acceptance.criterion_2d_prefactor(pairs=sweep_2d.extras["pairs"]), acceptance_log)


@pytest.mark.slow
def test_criterion_7_3d_exponents(acceptance_log):
    check(acceptance.criterion_3d_exponents(channels=(0, 1)), acceptance_log)


@pytest.mark.slow
def test_criterion_8_structural(acceptance_log):
    check(acceptance.criterion_structural(seed=0), acceptance_log)


def test_criterion_9_oracles(acceptance_log):
    check(acceptance.criterion_oracles(seed=0), acceptance_log)

"""Reference values computed independently in extended precision (mpmath) and frozen."""

# (kappa, Lambda) from a 40-digit Newton solve of Psi = dPsi/dxi = 0
KAPPA_MP = 0.63213836425065315
LAMBDA_MP = 1.8878371694031393

# |d/dx2 psi_2(0)| of the unit-norm threshold mode on (0, pi/2)
ABS_DPSI = 1.066094707195772

# J_m(x) from mpmath.besselj at 30 digits
BESSEL = {
    (0, 1.0): 0.76519768655796655145,
    (1, 1.0): 0.44005058574493351596,
    (2, 5.5): -0.11731548164728747597,
    (5, 12.3): -0.0084050359655248050187,
    (10, 3.0): 0.000012928351645715883778,
    (20, 35.0): -0.10927417397178036524,
    (3, 60.0): -0.040396711521655156971,
    (0, 100.0): 0.019985850304223122424,
}

# static symbol xi (cosh(pi xi) - 1 - pi^2 xi^2 / 2) / (sinh(pi xi) + pi xi) at 30 digits
M0 = {0.1: 0.000064278017866599149966, 1.0: 0.38509347990225978343, 3.0: 2.9734879678960205429}

# leading constants of the gap laws
NU1 = 70.6256160098992
NU2 = 0.17621012857191207
RHO = {0: 5.08351691854021, 1: 0.0036076994349112683}

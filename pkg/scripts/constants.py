"""Print the threshold data and the leading asymptotic constants."""
from crackmodes.asymptotics import constants_report
from crackmodes.dispersion import threshold
from crackmodes.modes import threshold_mode

th = threshold()
print(f"Lambda       = {th.Lambda:.15g}")
print(f"kappa        = {th.kappa:.15g}")
print(f"zeta1''      = {th.zeta1_pp:.15g}")
print(f"|d2 psi(0)|  = {threshold_mode().abs_dpsi:.15g}")
rep = constants_report(channels=(0, 1, 2))
print(f"nu1          = {rep.nu1:.15g}")
print(f"nu2          = {rep.nu2:.15g}")
for m, rho in rep.rho.items():
    print(f"rho_{m}        = {rho:.15g}")
for name, value in rep.checks.items():
    print(f"check {name}: {value}")

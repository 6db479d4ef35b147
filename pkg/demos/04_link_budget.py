"""From a required SNR to a distance, for the three laser colours."""
from tdhp_uwoc import BLUE, GREEN, RED, LinkGeometry, TdhpParams, lmax_for_params, snr_at_distance

geo = LinkGeometry()  # 0.5 W, 10 deg beam, 0.2 m aperture, 2 uW noise
for ch in (BLUE, GREEN, RED):
    pam2 = lmax_for_params(geo, ch, TdhpParams(0.0)).L_max
    pam4 = lmax_for_params(geo, ch, TdhpParams(1.0)).L_max
    print(f"{ch.name:>5} (K={ch.K}/m): PAM2 {pam2:5.1f} m, PAM4 {pam4:5.1f} m")

# Widening the beam spreads the power and costs distance.
wide = geo.with_(theta=30.0)
print("red, 30 deg beam:", ", ".join(
    f"{lmax_for_params(wide, RED, TdhpParams(p)).L_max:.2f} m" for p in (0.0, 1.0)))

print(f"\nSNR 50 m into blue water: {snr_at_distance(geo, BLUE.K, 50.0):.1f} (linear)")

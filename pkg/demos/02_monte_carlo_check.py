"""Monte-Carlo BER against the closed form, at each format's own FEC limit.

The simulated frame mixes PAM2 and PAM4 symbols, so there are two ways to
read its error rate.  ``ber_tdhp`` is errors per transmitted bit and weights
PAM4 by its share of the bits.  ``ber_mixture`` weights each format by its
share of the symbols, which is what the closed form describes.

    python demos/02_monte_carlo_check.py [symbols]
"""
import sys

from tdhp_uwoc import FEC_THRESHOLD, TdhpParams, fec_limit_snr, measure_ber

n = int(float(sys.argv[1])) if len(sys.argv) > 1 else 2_000_000

for p, q in [(0.0, 0.0), (1.0, 0.0), (0.5, 0.0), (0.5, 0.6)]:
    params = TdhpParams(p, q)
    snr = fec_limit_snr(params, tol_db=1e-6).snr_linear
    est = measure_ber(params, snr, n, seed=7, threads=4)
    print(
        f"p={p:.1f} q={q:.1f}: mixture {est.ber_mixture:.3e} +/- {est.ci95_mixture:.1e}"
        f"  per-bit {est.ber_tdhp:.3e}  (target {FEC_THRESHOLD:g})"
    )

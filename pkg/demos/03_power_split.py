"""How much SNR the PAM2/PAM4 power split q buys at each PAM4 ratio."""
from tdhp_uwoc import TdhpParams, fec_limit_snr, optimize_q

print(" p    q*   FEC(q=0)  FEC(q*)   gain")
for k in range(1, 10):
    p = k / 10
    base = fec_limit_snr(TdhpParams(p)).snr_db
    opt = optimize_q(p)
    print(f"{p:.1f}  {opt.q_star:.1f}  {base:7.3f}  {opt.snr_at_fec_limit:7.3f}  {base - opt.snr_at_fec_limit:5.2f} dB")

# the grid answer can be polished with a bounded scalar search
fine = optimize_q(0.5, refine=True)
print(f"\nrefined optimum at p=0.5: q={fine.q_star:.4f}, {fine.snr_at_fec_limit:.4f} dB")

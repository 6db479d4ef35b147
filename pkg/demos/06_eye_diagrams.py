"""Eye diagrams for PAM2, PAM4 and a TDHP frame, clean and at 18 dB.

    python demos/06_eye_diagrams.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from tdhp_uwoc import TdhpParams, db_linear, eye_traces
from tdhp_uwoc.output import svg_lines

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

for fmt in ("pam2", "pam4", "tdhp"):
    for snr_db in (None, 18.0):
        snr = None if snr_db is None else db_linear(snr_db)
        eye = eye_traces(fmt, TdhpParams(0.5, 0.6), snr, n_traces=60, seed=3)
        t = np.arange(eye.traces.shape[1]) / eye.samples_per_symbol
        series = {str(i): (t, tr) for i, tr in enumerate(eye.traces)}
        tag = "clean" if snr_db is None else f"{snr_db:g}dB"
        (out / f"eye_{fmt}_{tag}.svg").write_text(svg_lines(series, f"{fmt} {tag}", "time [symbols]", "amplitude"))
        print(f"{fmt:>4} {tag:>5}: spread at decision instant {eye.spread():.3f}")

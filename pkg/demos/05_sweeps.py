"""Distance against PAM4 ratio, with and without the optimal power split.

    python demos/05_sweeps.py [outdir]
"""
import sys
from pathlib import Path

from tdhp_uwoc import sweep_geometry, sweep_p
from tdhp_uwoc.output import svg_lines, write_records
from tdhp_uwoc.sweeps import CSV_FIELDS, lmax_improvement

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

rows = sweep_p(threads=4)
write_records(out / "sweep_p.csv", [r.as_dict() for r in rows], CSV_FIELDS)

series = {}
for r in rows:
    xs, ys = series.setdefault(f"{r.channel} {r.mode}", ([], []))
    xs.append(r.p)
    ys.append(r.lmax_m)
(out / "sweep_p.svg").write_text(svg_lines(series, "L_max vs p", "PAM4 ratio p", "L_max [m]"))

gains = lmax_improvement(rows)
for ch in ("blue", "green", "red"):
    best = max(v for (c, _), v in gains.items() if c == ch)
    print(f"{ch:>5}: optimal q adds up to {best:.2f} m")

# A larger field of view means a larger aperture and a longer link.
fov = sweep_geometry("fov", [5, 10, 15, 20, 25], p_grid=[0.0, 1.0], threads=4)
for r in fov:
    if r.channel == "blue" and r.mode == "optimum":
        print(f"blue fov={r.value:>4g} p={r.p:g}: {r.lmax_m:6.1f} m")
print(f"wrote {out / 'sweep_p.csv'} and {out / 'sweep_p.svg'}")

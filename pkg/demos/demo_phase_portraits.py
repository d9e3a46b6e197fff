"""Three regimes of the pericenter flow on the (g, G) cylinder.

For eps below 1/2 two centers organize pure librations; crossing 1/2 the
origin turns into a saddle with its own separatrix while a pair of centers
appears on the G-axis; above 1 rotational level sets wind around the
cylinder.  Writes one portrait CSV per regime next to this script.
"""

import os

from perilib import find_equilibria, phase_portrait
from perilib.portraits import has_rotational_orbits, is_closed

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)

for eps in (0.3, 0.7, 1.5):
    print(f"eps = {eps}")
    for e in find_equilibria(eps, 1.0):
        g, G = e.location
        lam = e.eigenvalues[0]
        print(f"  {e.kind:6s} at (g, G) = ({g:+.4f}, {G:+.4f}), "
              f"lambda = {lam.real:+.3f}{lam.imag:+.3f}i")
    lines = phase_portrait(eps, 1.0, grid=(129, 129), levels=14)
    closed = sum(is_closed(ln) for _, ln in lines)
    print(f"  {len(lines)} contour polylines ({closed} closed); "
          f"rotational orbits: {has_rotational_orbits(eps)}")
    path = os.path.join(out_dir, f"portrait_eps{eps}.csv")
    with open(path, "w") as fh:
        fh.write("level,g,G\n")
        for lv, ln in lines:
            for g, G in ln:
                fh.write(f"{lv:.8g},{g:.8g},{G:.8g}\n")
            fh.write(f"# polyline,{lv:.8g}\n")
    print(f"  wrote {path}")

"""Plot data as CSV (the contract) plus a self-contained SVG rendering.

SVG geometry is written in data coordinates mapped through a single
``transform`` matrix, so every number in the drawing is a data value
printed to 6 significant digits.
"""
import csv
import io

import numpy as np

WIDTH, HEIGHT, PAD = 800.0, 300.0, 40.0


def g6(x):
    return f"{float(x):.6g}"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _frame(xmin, xmax, ymin, ymax):
    if ymax == ymin:
        ymax, ymin = ymax + 1.0, ymin - 1.0
    if xmax == xmin:
        xmax += 1.0
    sx = (WIDTH - 2 * PAD) / (xmax - xmin)
    sy = -(HEIGHT - 2 * PAD) / (ymax - ymin)
    tx = PAD - sx * xmin
    ty = HEIGHT - PAD - sy * ymin
    return f"matrix({g6(sx)} 0 0 {g6(sy)} {g6(tx)} {g6(ty)})"


def _svg(title, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:g}" height="{HEIGHT:g}" '
        f'viewBox="0 0 {WIDTH:g} {HEIGHT:g}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<text x="{PAD:g}" y="20" font-family="sans-serif" font-size="13">{title}</text>\n'
        f"{body}</svg>\n"
    )


def line_svg(title, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pts = " ".join(f"{g6(a)},{g6(b)}" for a, b in zip(x, y))
    tr = _frame(x.min(), x.max(), y.min(), y.max())
    body = (f'<g transform="{tr}"><polyline fill="none" stroke="steelblue" '
            f'vector-effect="non-scaling-stroke" stroke-width="1" points="{pts}"/></g>\n')
    return _svg(title, body)


def acf_svg(title, lags, rho, ci):
    lags = np.asarray(lags, dtype=float)
    lo = min(float(np.min(rho)), -ci, 0.0)
    hi = max(float(np.max(rho)), ci, 0.0)
    tr = _frame(0.0, lags.max() + 1, lo, hi)
    bars = "".join(f'<line x1="{g6(l)}" y1="0" x2="{g6(l)}" y2="{g6(r)}"/>'
                   for l, r in zip(lags, rho))
    xmax = g6(lags.max() + 1)
    band = (f'<line x1="0" y1="{g6(ci)}" x2="{xmax}" y2="{g6(ci)}" stroke="firebrick"/>'
            f'<line x1="0" y1="{g6(-ci)}" x2="{xmax}" y2="{g6(-ci)}" stroke="firebrick"/>')
    body = (f'<g transform="{tr}" stroke="steelblue" vector-effect="non-scaling-stroke" '
            f'stroke-width="1">{bars}{band}</g>\n')
    return _svg(title, body)


def acf_plot(name, title, result):
    ci = result.ci_halfwidth
    rows = [(int(l), float(r), ci) for l, r in zip(result.lags, result.rho)]
    return {
        f"{name}.csv": csv_text(["lag", "rho", "ci"], rows),
        f"{name}.svg": acf_svg(title, result.lags, result.rho, ci),
    }


def series_plot(name, title, dates, values, column="value"):
    idx = np.arange(1, len(values) + 1)
    if dates is None:
        dates = idx
    rows = [(str(d), float(v)) for d, v in zip(dates, values)]
    return {
        f"{name}.csv": csv_text(["date", column], rows),
        f"{name}.svg": line_svg(title, idx, values),
    }

"""Standalone SVG plot emission.

Plots are assembled from string templates so identical inputs produce
byte-identical files (no timestamps, no library-version metadata).
"""

from .formats import fmt_num

_FONT = 'font-family="Helvetica, Arial, sans-serif"'


def _svg(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + body
        + "</svg>\n"
    )


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = span / n
    return [lo + i * step for i in range(n + 1)]


def bar_chart(labels, values, errors=None, title="", y_label="", width=640, height=400):
    """Vertical bars with optional symmetric error whiskers."""
    ml, mr, mt, mb = 70, 20, 50, 60
    pw, ph = width - ml - mr, height - mt - mb
    errs = [0.0] * len(values) if errors is None else list(errors)
    top = max(v + e for v, e in zip(values, errs)) if values else 1.0
    top = top * 1.15 if top > 0 else 1.0
    parts = [f'<text x="{width / 2}" y="24" text-anchor="middle" {_FONT} font-size="16">{title}</text>\n']
    # axes and y ticks
    parts.append(
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>\n'
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>\n'
    )
    for tick in _ticks(0.0, top):
        y = mt + ph - tick / top * ph
        parts.append(
            f'<line x1="{ml - 4}" y1="{fmt_num(y)}" x2="{ml}" y2="{fmt_num(y)}" stroke="black"/>\n'
            f'<text x="{ml - 8}" y="{fmt_num(y + 4)}" text-anchor="end" {_FONT} font-size="11">{fmt_num(tick)}</text>\n'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{mt + ph / 2}" {_FONT} font-size="12" '
            f'transform="rotate(-90 16 {mt + ph / 2})" text-anchor="middle">{y_label}</text>\n'
        )
    n = len(values)
    slot = pw / max(n, 1)
    bw = slot * 0.6
    for i, (label, value, err) in enumerate(zip(labels, values, errs)):
        x = ml + i * slot + (slot - bw) / 2
        h = value / top * ph
        y = mt + ph - h
        parts.append(
            f'<rect x="{fmt_num(x)}" y="{fmt_num(y)}" width="{fmt_num(bw)}" height="{fmt_num(h)}" '
            f'fill="#4878a8" stroke="black" stroke-width="0.5"/>\n'
        )
        if err > 0:
            cx = x + bw / 2
            y1 = mt + ph - (value + err) / top * ph
            y2 = mt + ph - max(value - err, 0.0) / top * ph
            parts.append(
                f'<line x1="{fmt_num(cx)}" y1="{fmt_num(y1)}" x2="{fmt_num(cx)}" y2="{fmt_num(y2)}" stroke="black"/>\n'
                f'<line x1="{fmt_num(cx - 5)}" y1="{fmt_num(y1)}" x2="{fmt_num(cx + 5)}" y2="{fmt_num(y1)}" stroke="black"/>\n'
                f'<line x1="{fmt_num(cx - 5)}" y1="{fmt_num(y2)}" x2="{fmt_num(cx + 5)}" y2="{fmt_num(y2)}" stroke="black"/>\n'
            )
        parts.append(
            f'<text x="{fmt_num(x + bw / 2)}" y="{mt + ph + 18}" text-anchor="middle" {_FONT} font-size="12">{label}</text>\n'
        )
    return _svg(width, height, "".join(parts))


def predicted_observed(labels, observed, predicted, title="", width=640, height=400):
    """Per-profile observed points and predicted crosses over a shared axis."""
    ml, mr, mt, mb = 70, 20, 50, 60
    pw, ph = width - ml - mr, height - mt - mb
    lo = min(min(observed), min(predicted))
    hi = max(max(observed), max(predicted))
    pad = (hi - lo) * 0.15 if hi > lo else 0.1
    lo, hi = lo - pad, hi + pad
    parts = [f'<text x="{width / 2}" y="24" text-anchor="middle" {_FONT} font-size="16">{title}</text>\n']
    parts.append(
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>\n'
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>\n'
    )
    for tick in _ticks(lo, hi):
        y = mt + ph - (tick - lo) / (hi - lo) * ph
        parts.append(
            f'<line x1="{ml - 4}" y1="{fmt_num(y)}" x2="{ml}" y2="{fmt_num(y)}" stroke="black"/>\n'
            f'<text x="{ml - 8}" y="{fmt_num(y + 4)}" text-anchor="end" {_FONT} font-size="11">{fmt_num(tick)}</text>\n'
        )
    n = len(labels)
    slot = pw / max(n, 1)

    def ypix(v):
        return mt + ph - (v - lo) / (hi - lo) * ph

    # connect predictions to show the model surface
    pts = " ".join(
        f"{fmt_num(ml + (i + 0.5) * slot)},{fmt_num(ypix(v))}" for i, v in enumerate(predicted)
    )
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#c05050" stroke-width="1.5"/>\n')
    for i, label in enumerate(labels):
        x = ml + (i + 0.5) * slot
        yo = ypix(observed[i])
        yp = ypix(predicted[i])
        parts.append(f'<circle cx="{fmt_num(x)}" cy="{fmt_num(yo)}" r="4" fill="#4878a8"/>\n')
        parts.append(
            f'<line x1="{fmt_num(x - 4)}" y1="{fmt_num(yp - 4)}" x2="{fmt_num(x + 4)}" y2="{fmt_num(yp + 4)}" stroke="#c05050" stroke-width="1.5"/>\n'
            f'<line x1="{fmt_num(x - 4)}" y1="{fmt_num(yp + 4)}" x2="{fmt_num(x + 4)}" y2="{fmt_num(yp - 4)}" stroke="#c05050" stroke-width="1.5"/>\n'
        )
        parts.append(
            f'<text x="{fmt_num(x)}" y="{mt + ph + 18}" text-anchor="middle" {_FONT} font-size="12">{label}</text>\n'
        )
    legend_y = mt + 8
    parts.append(
        f'<circle cx="{ml + pw - 150}" cy="{legend_y}" r="4" fill="#4878a8"/>\n'
        f'<text x="{ml + pw - 140}" y="{legend_y + 4}" {_FONT} font-size="11">observed</text>\n'
        f'<line x1="{ml + pw - 74}" y1="{legend_y - 4}" x2="{ml + pw - 66}" y2="{legend_y + 4}" stroke="#c05050" stroke-width="1.5"/>\n'
        f'<line x1="{ml + pw - 74}" y1="{legend_y + 4}" x2="{ml + pw - 66}" y2="{legend_y - 4}" stroke="#c05050" stroke-width="1.5"/>\n'
        f'<text x="{ml + pw - 60}" y="{legend_y + 4}" {_FONT} font-size="11">predicted</text>\n'
    )
    return _svg(width, height, "".join(parts))

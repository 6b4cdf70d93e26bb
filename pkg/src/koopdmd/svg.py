"""Unit-circle eigenvalue plot as a standalone SVG document."""

from __future__ import annotations

import numpy as np

SIZE = 400
MARGIN = 40


def spectrum_svg(eigenvalues, title: str = "eigenvalues") -> str:
    lam = np.asarray(eigenvalues, dtype=complex)
    reach = max(1.0, float(np.max(np.abs(lam), initial=0.0))) * 1.1
    unit = (SIZE / 2 - MARGIN) / reach
    c = SIZE / 2

    def px(z):
        return c + z.real * unit, c - z.imag * unit

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}"'
        f' viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title}</title>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{c:.3f}" x2="{SIZE - MARGIN}" y2="{c:.3f}" stroke="#999" stroke-width="1"/>',
        f'<line x1="{c:.3f}" y1="{MARGIN}" x2="{c:.3f}" y2="{SIZE - MARGIN}" stroke="#999" stroke-width="1"/>',
        f'<circle class="unit-circle" cx="{c:.3f}" cy="{c:.3f}" r="{unit:.3f}" fill="none"'
        ' stroke="black" stroke-width="1.5"/>',
    ]
    for i, z in enumerate(lam):
        x, y = px(z)
        parts.append(
            f'<circle class="eig" data-index="{i}" data-re="{z.real!r}" data-im="{z.imag!r}"'
            f' cx="{x:.3f}" cy="{y:.3f}" r="4" fill="#c0392b"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

#!/usr/bin/env python3
"""
Generate PNG figures of sample elements and approximations.

Writes into THOMPSON_FIGURES_DIR (default /tmp/thompson_figures):
the three-piece circle element in both pictures, the eleven-piece dyadic
interpolation path, and bump:0.3 next to its F approximations.
"""

import sys
import traceback
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from PIL import Image, ImageDraw

from thompson_approx.core.approx import approximate
from thompson_approx.core.dyadic import Dyadic
from thompson_approx.core.funcspec import parse_family
from thompson_approx.core.interp import dyadic_interpolation
from thompson_approx.core.plmap import PLMap, Space, from_pairs
from thompson_approx.paths import get_figures_dir
from thompson_approx.services.plot_service import render_element, save_png, theme


def circle_example() -> PLMap:
    half, quarter = Dyadic(1, 1), Dyadic(1, 2)
    return from_pairs(
        Space.CIRCLE,
        [(0, half), (half, half + quarter), (half + quarter, 1), (1, half + 1)],
    )


def interpolation_example() -> PLMap:
    """Path from (0, 0) to (1/4, 11/64), padded to an element of F."""
    points = dyadic_interpolation((Dyadic(0), Dyadic(0)), (Dyadic(1, 2), Dyadic(11, 6)))
    return PLMap(Space.INTERVAL, (*points, (Dyadic(1), Dyadic(1))))


def generate_figures() -> Path:
    output_dir = get_figures_dir()
    output_dir.mkdir(parents=True, exist_ok=True)
    print(f"Generating figures in {output_dir}")
    print("-" * 50)

    images = []

    print("1. Circle element, lift and circle pictures...")
    g = circle_example()
    for mode in ("lift", "circle"):
        image = render_element(g, mode=mode)
        save_png(image, output_dir / f"circle_element_{mode}.png")
        images.append((f"circle element ({mode})", image))

    print("2. Dyadic interpolation path...")
    image = render_element(interpolation_example())
    save_png(image, output_dir / "dyadic_interpolation.png")
    images.append(("dyadic interpolation", image))

    print("3. bump:0.3 approximations...")
    f = parse_family("bump:0.3")
    for k in (3, 5):
        g, params = approximate(f, 2.0**-k)
        image = render_element(g, f)
        save_png(image, output_dir / f"bump_eps_2-{k}.png")
        images.append((f"eps = 2^-{k}, {g.pieces} pieces", image))
        print(f"   eps=2^-{k}: Delta={params.Delta}, {g.pieces} pieces")

    width, height = theme.dimensions.width, theme.dimensions.height
    combined = Image.new("RGB", (width * len(images), height + 24), "white")
    draw = ImageDraw.Draw(combined)
    for i, (title, img) in enumerate(images):
        combined.paste(img, (i * width, 24))
        draw.text((i * width + 8, 6), title, fill="black")
    combined_path = output_dir / "all_figures.png"
    combined.save(str(combined_path))
    print(f"Combined figure saved: {combined_path}")

    return output_dir


if __name__ == "__main__":
    try:
        output_dir = generate_figures()
        print(f"\nView the images in: {output_dir}")
    except Exception as e:
        print(f"Error generating figures: {e}")
        traceback.print_exc()
        sys.exit(1)

"""
Run the classifier, the capacity engine and the cross check over every spec
file in specs/ and print a short report.
"""

import sys
import os
from pathlib import Path

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from pcapacity.errors import PCapacityError
from pcapacity.models import base_manifold
from pcapacity.sources import (
    create_classify_options,
    create_parabolicity_service,
    create_quadrature_spec,
    load_spec,
)

SPECS_DIR = Path(__file__).parent.parent / "specs"
P_VALUES = (1.5, 2.0, 3.0, 4.0)


def run_spec(path: Path):
    print(f"\n{path.name}")
    try:
        spec = load_spec(path)
        manifold = spec.to_manifold() if spec.kind == "warped_product" else base_manifold(spec.to_submersion())
        service = create_parabolicity_service(create_quadrature_spec(spec.options), create_classify_options(spec.options))
    except PCapacityError as e:
        print(f"   ✗ cannot load: {e}")
        return

    for p in P_VALUES:
        try:
            result = service.cross_check(manifold, p)
            verdict = result["criterion"]
            mark = "✓" if result["agrees"] is not False else "✗"
            print(
                f"   {mark} p={p}: {verdict['decision']:<12} capacity {result['capacity_trend']:<12}"
                f" tail {verdict['tail_exponent']}"
            )
        except PCapacityError as e:
            print(f"   ✗ p={p}: {type(e).__name__}: {e}")


def main():
    paths = sorted(SPECS_DIR.glob("*.json"))
    print(f"Running {len(paths)} spec files from {SPECS_DIR}")
    for path in paths:
        run_spec(path)


if __name__ == "__main__":
    main()

import sys
from pathlib import Path

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import RESULTS_DIR
from src.results import load_results

SWEEP_FILE = RESULTS_DIR / "sweep.csv"

FIDELITY_WARNING = 1 - 1e-4


def summarize(df: pd.DataFrame) -> dict:
    values = df["value"].to_numpy()
    phases = np.unwrap(df["constant_phase_rad"].to_numpy())
    summary = {
        "parameter": str(df["parameter"].iloc[0]),
        "steps": len(df),
        "fidelity_min": float(df["fidelity_opt"].min()),
        "fidelity_max": float(df["fidelity_opt"].max()),
        "concurrence_min": float(df["concurrence"].min()),
        "fidelity_monotonic": bool(df["fidelity_opt"].is_monotonic_decreasing or df["fidelity_opt"].is_monotonic_increasing),
        "phase_slope": float("nan"),
        "max_voltage_v": float(df["max_voltage_v"].max()),
    }
    if len(df) >= 2 and np.ptp(values) > 0:
        summary["phase_slope"] = float(np.polyfit(values, phases, 1)[0])
    return summary


def analyze_sweep(df: pd.DataFrame):
    if df is None or df.empty:
        print("\nNo sweep rows to analyze")
        return

    s = summarize(df)
    print("\n" + "=" * 60)
    print(f"SWEEP OVER {s['parameter']}")
    print("=" * 60)

    print(f"\nSteps: {s['steps']}")
    print(f"\nBell fidelity (optimal phase):")
    print(f"  Min: {s['fidelity_min']:.9f}")
    print(f"  Max: {s['fidelity_max']:.9f}")
    print(f"  Monotonic: {s['fidelity_monotonic']}")
    print(f"\nConcurrence min: {s['concurrence_min']:.9f}")
    print(f"\nConstant phase slope: {s['phase_slope']:.6e} rad per unit of {s['parameter']}")
    print(f"\nMax ramp voltage: {s['max_voltage_v']:.1f} V")

    if s["fidelity_min"] < FIDELITY_WARNING:
        print(f"\n- Fidelity drops below {FIDELITY_WARNING} somewhere in the sweep.")


def main():
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else SWEEP_FILE
    if not path.exists():
        print(f"File {path} not found")
        return
    df = load_results(path)
    print(f"Loaded {len(df)} rows from {path}")
    analyze_sweep(df)


if __name__ == "__main__":
    main()

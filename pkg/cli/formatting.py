from typing import List

from src.results import ResultRow
from .handlers import FeasibilityReport, OracleCheckReport


def format_row_summary(row: ResultRow) -> str:
    return "\n".join([
        "Simulation result:",
        f"  Bell fidelity (optimal phase): {row.fidelity_opt:.9f}",
        f"  Bell fidelity (raw phase):     {row.fidelity_raw:.9f}",
        f"  Concurrence:                   {row.concurrence:.9f}",
        f"  Constant phase:                {row.constant_phase_rad:.6f} rad",
        f"  Residual kappa (1, 2):         {row.residual_kappa1:.3e}, {row.residual_kappa2:.3e} rad/m",
        f"  Amplitude ratio deviation:     {row.epsilon_amp:.3e}",
        f"  Ramp rates b1, b2:             {row.b1_v_per_ns:.3f}, {row.b2_v_per_ns:.3f} V/ns",
        f"  Max voltage:                   {row.max_voltage_v:.1f} V",
    ])


def format_sweep_summary(rows: List[ResultRow]) -> str:
    if not rows:
        return "Sweep produced no rows"
    fidelities = [r.fidelity_opt for r in rows]
    return "\n".join([
        f"Sweep over {rows[0].parameter}: {len(rows)} steps from {rows[0].value:g} to {rows[-1].value:g}",
        f"  Fidelity (optimal phase): min {min(fidelities):.9f}, max {max(fidelities):.9f}",
    ])


def format_feasibility(report: FeasibilityReport) -> str:
    lines = [
        f"Feasibility (scheme {report.scheme}):",
        f"  Ramp rate b1: {report.b1_v_per_ns:.3f} V/ns",
        f"  Ramp rate b2: {report.b2_v_per_ns:.3f} V/ns",
        f"  Max voltage over {report.ramp_duration_ns:g} ns: {report.max_voltage_v:.1f} V",
    ]
    if report.series_cells > 1:
        lines.append(
            f"  With {report.series_cells} cells in series: "
            f"{report.per_cell_b1_v_per_ns:.3f} / {report.per_cell_b2_v_per_ns:.3f} V/ns, "
            f"{report.per_cell_voltage_v:.1f} V per cell"
        )
    return "\n".join(lines)


def format_oracle(report: OracleCheckReport) -> str:
    lines = ["Oracle check:"]
    for check in report.checks:
        status = "ok" if check.passed else "FAIL"
        lines.append(f"  [{status:4}] {check.name}: {check.value:.3e} (< {check.tolerance:.0e})")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)

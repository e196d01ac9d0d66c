#!/usr/bin/env python3
"""
Summarize an aggregated result CSV: per-sweep rate tables, downlink scheme
ordering and uplink interference-threshold checks
"""
import re

import click
import pandas as pd

from src.datastore import load_rows
from src.errors import InvalidParameterError

# Schemes that cap their uplink power against the threshold
_THRESHOLD_SCHEMES = ("ul_sensing", "ul_sensing_csi", "ul_optimal")
_SENSING_LABEL = re.compile(r"^(?P<family>\w+?_sensing(?:_csi)?)_m(?P<m>\d+)$")


def scheme_family(label):
    """('dl_sensing', 15) for 'dl_sensing_m15', (label, None) otherwise"""
    match = _SENSING_LABEL.match(label)
    if match:
        return match.group("family"), int(match.group("m"))
    return label, None


def rate_table(df, sweep_name, column="mean_rate_bps_hz"):
    """Sweep value by scheme table of one column"""
    subset = df[df["sweep_name"] == sweep_name]
    table = subset.pivot(index="sweep_value", columns="scheme", values=column)
    return table[list(dict.fromkeys(subset["scheme"]))]


def downlink_order(schemes):
    """Schemes from lowest to highest expected rate: conventional, sensing by M_d, optimal"""
    ranked = []
    for label in schemes:
        family, m = scheme_family(label)
        if family == "dl_conventional":
            ranked.append(((0, 0), label))
        elif family == "dl_sensing":
            ranked.append(((1, m), label))
        elif family == "dl_optimal":
            ranked.append(((2, 0), label))
    return [label for _, label in sorted(ranked)]


def ordering_violations(df, tolerance=0.0):
    """(sweep value, lower scheme, higher scheme, lower rate, higher rate) where the downlink order breaks"""
    if "p_dl_dbm" not in set(df["sweep_name"]):
        return []
    table = rate_table(df, "p_dl_dbm")
    order = downlink_order(table.columns)
    violations = []
    for value, row in table.iterrows():
        for lower, higher in zip(order, order[1:]):
            if row[lower] > row[higher] * (1 + tolerance):
                violations.append((value, lower, higher, row[lower], row[higher]))
    return violations


def threshold_violations(df, tolerance_db=1e-9):
    """Uplink rows whose worst interference exceeds the swept threshold"""
    uplink = df[df["sweep_name"] == "gamma_u_dbm"]
    capped = uplink[[scheme_family(s)[0] in _THRESHOLD_SCHEMES for s in uplink["scheme"]]]
    return capped[capped["max_iul_dbm"] > capped["sweep_value"] + tolerance_db]


def analyze_results(csv_file, tolerance):
    try:
        df = load_rows(csv_file)
    except (FileNotFoundError, InvalidParameterError) as e:
        print(f"❌ {e}")
        return False

    print(f"✅ Loaded {len(df)} rows from {csv_file}")
    print(f"📊 Schemes: {', '.join(dict.fromkeys(df['scheme']))}")
    ok = True

    with pd.option_context("display.width", 160, "display.max_columns", 20, "display.precision", 4):
        for sweep_name in dict.fromkeys(df["sweep_name"]):
            print(f"\n=== Mean rate (bps/Hz) vs {sweep_name} ===")
            print(rate_table(df, sweep_name).to_string())
            if sweep_name == "gamma_u_dbm":
                print(f"\n=== Mean worst-case interference (dBm) vs {sweep_name} ===")
                print(rate_table(df, sweep_name, "mean_iul_dbm").to_string())

    violations = ordering_violations(df, tolerance)
    if violations:
        ok = False
        print(f"\n❌ {len(violations)} downlink ordering violations:")
        for value, lower, higher, low_rate, high_rate in violations:
            print(f"   P_DL={value:g} dBm: {lower} {low_rate:.4f} > {higher} {high_rate:.4f}")
    elif "p_dl_dbm" in set(df["sweep_name"]):
        print("\n✅ Downlink ordering holds at every sweep point")

    exceeded = threshold_violations(df)
    if len(exceeded):
        ok = False
        print(f"\n❌ {len(exceeded)} uplink rows above the interference threshold:")
        for _, row in exceeded.iterrows():
            excess = row["max_iul_dbm"] - row["sweep_value"]
            print(f"   {row['scheme']} at {row['sweep_value']:g} dBm: +{excess:.3g} dB")
    elif "gamma_u_dbm" in set(df["sweep_name"]):
        print("\n✅ Power-controlled uplink schemes stay under the threshold")
    return ok


@click.command()
@click.argument('csv_file')
@click.option('--tolerance', default=0.0, show_default=True, help='Relative slack for the downlink ordering check')
def main(csv_file, tolerance):
    """
    Summarize an aggregated result CSV written by icic-sim run

    Examples:
        analyze-results fig3a.csv
        analyze-results fig3a.csv --tolerance 0.01
    """
    if not analyze_results(csv_file, tolerance):
        raise SystemExit(1)


if __name__ == "__main__":
    main()

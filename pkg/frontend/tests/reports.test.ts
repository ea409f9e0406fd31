import { describe, expect, it } from "vitest";

import { BAND, importanceBars, monthlyPoints } from "../src/reports.js";
import { ImportanceResponse, MonthlyResponse, MonthlyRow } from "../src/types.js";

function importanceOf(shares: Array<[string, number]>): ImportanceResponse {
  return {
    artifact_hash: "abc123def456",
    importance: shares.map(([feature, gain_share]) => ({ feature, gain_share })),
  };
}

describe("importanceBars", () => {
  const response = importanceOf([
    ["steam_lag_3", 0.05],
    ["oil_lag_31", 0.4],
    ["oil_lag_32", 0.2],
    ["steam_lag_1", 0.1],
    ["oil_lag_33", 0.08],
    ["gas_day_rate", 0.06],
    ["steam_lag_2", 0.04],
    ["oil_lag_34", 0.03],
    ["steam_lag_4", 0.02],
    ["steam_lag_5", 0.02],
  ]);

  it("returns bars in descending gain-share order", () => {
    const bars = importanceBars(response);
    for (let k = 1; k < bars.length; k++) {
      expect(bars[k].gainShare).toBeLessThanOrEqual(bars[k - 1].gainShare);
    }
    expect(bars[0].feature).toBe("oil_lag_31");
  });

  it("keeps exactly the top 8 by default", () => {
    const bars = importanceBars(response);
    expect(bars).toHaveLength(8);
    expect(bars.map((b) => b.feature)).not.toContain("steam_lag_4");
  });

  it("respects a smaller top-N", () => {
    expect(importanceBars(response, 3).map((b) => b.feature)).toEqual([
      "oil_lag_31",
      "oil_lag_32",
      "steam_lag_1",
    ]);
  });

  it("widths are relative to the largest bar", () => {
    const bars = importanceBars(response);
    expect(bars[0].width).toBe(1);
    const byFeature = new Map(bars.map((b) => [b.feature, b.width]));
    expect(byFeature.get("oil_lag_32")).toBeCloseTo(0.5, 12);
    expect(byFeature.get("steam_lag_1")).toBeCloseTo(0.25, 12);
  });

  it("breaks gain-share ties alphabetically for a stable display", () => {
    const bars = importanceBars(
      importanceOf([
        ["b_feature", 0.5],
        ["a_feature", 0.5],
      ]),
    );
    expect(bars.map((b) => b.feature)).toEqual(["a_feature", "b_feature"]);
  });

  it("handles fewer entries than requested", () => {
    const bars = importanceBars(importanceOf([["only", 0.2]]));
    expect(bars).toHaveLength(1);
    expect(bars[0].width).toBe(1);
  });
});

function monthRow(partial: Partial<MonthlyRow>): MonthlyRow {
  return {
    month: "2020-01",
    actual: 200,
    predicted: 200,
    rel_error: 0,
    within_band: true,
    zero_actual: false,
    ...partial,
  };
}

function monthlyOf(rows: MonthlyRow[]): MonthlyResponse {
  return { artifact_hash: "abc123def456", months: rows };
}

describe("monthlyPoints", () => {
  it("a month at 9% relative error sits inside the band and is not flagged", () => {
    const [point] = monthlyPoints(
      monthlyOf([monthRow({ actual: 200, predicted: 218, rel_error: 0.09, within_band: true })]),
    );
    expect(point.flagged).toBe(false);
    expect(point.predicted).toBeLessThanOrEqual(point.bandHigh);
    expect(point.predicted).toBeGreaterThanOrEqual(point.bandLow);
  });

  it("a month at 12% relative error is flagged", () => {
    const [point] = monthlyPoints(
      monthlyOf([monthRow({ actual: 200, predicted: 224, rel_error: 0.12, within_band: false })]),
    );
    expect(point.flagged).toBe(true);
    expect(point.predicted).toBeGreaterThan(point.bandHigh);
  });

  it("band edges are ±10% of the actual", () => {
    const [point] = monthlyPoints(monthlyOf([monthRow({ actual: 500, predicted: 500 })]));
    expect(BAND).toBe(0.1);
    expect(point.bandLow).toBeCloseTo(450, 12);
    expect(point.bandHigh).toBeCloseTo(550, 12);
  });

  it("trusts the service's in/out-of-band verdict instead of recomputing", () => {
    // contrived payload: verdict disagrees with the numbers — the display
    // must follow the service, which owns boundary semantics
    const [point] = monthlyPoints(
      monthlyOf([monthRow({ actual: 200, predicted: 260, within_band: true })]),
    );
    expect(point.flagged).toBe(false);
  });

  it("zero-production months are never flagged", () => {
    const [point] = monthlyPoints(
      monthlyOf([
        monthRow({ actual: 0, predicted: 3, rel_error: null, within_band: false, zero_actual: true }),
      ]),
    );
    expect(point.zeroActual).toBe(true);
    expect(point.flagged).toBe(false);
  });

  it("preserves month order and payload values", () => {
    const points = monthlyPoints(
      monthlyOf([
        monthRow({ month: "2020-01", actual: 180, predicted: 171 }),
        monthRow({ month: "2020-02", actual: 190, predicted: 209, within_band: false }),
      ]),
    );
    expect(points.map((p) => p.month)).toEqual(["2020-01", "2020-02"]);
    expect(points[0].actual).toBe(180);
    expect(points[1].predicted).toBe(209);
    expect(points.map((p) => p.flagged)).toEqual([false, true]);
  });
});

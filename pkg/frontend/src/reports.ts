/** Pure view-model builders for the importance and monthly-accuracy panels. */
import { ImportanceResponse, MonthlyResponse, MonthlyRow } from "./types.js";

export interface ImportanceBar {
  feature: string;
  gainShare: number;
  /** bar width relative to the largest share, 0..1 */
  width: number;
}

export function importanceBars(response: ImportanceResponse, top = 8): ImportanceBar[] {
  const entries = [...response.importance]
    .sort((a, b) => b.gain_share - a.gain_share || a.feature.localeCompare(b.feature))
    .slice(0, top);
  const max = entries.length > 0 ? entries[0].gain_share : 1;
  return entries.map((e) => ({
    feature: e.feature,
    gainShare: e.gain_share,
    width: max > 0 ? e.gain_share / max : 0,
  }));
}

export const BAND = 0.1;

export interface MonthlyPoint {
  month: string;
  actual: number;
  predicted: number;
  bandLow: number;
  bandHigh: number;
  /** true when the service marked the month outside the ±10% band */
  flagged: boolean;
  zeroActual: boolean;
}

export function monthlyPoints(response: MonthlyResponse): MonthlyPoint[] {
  return response.months.map((row: MonthlyRow) => ({
    month: row.month,
    actual: row.actual,
    predicted: row.predicted,
    bandLow: row.actual * (1 - BAND),
    bandHigh: row.actual * (1 + BAND),
    flagged: !row.zero_actual && !row.within_band,
    zeroActual: row.zero_actual,
  }));
}

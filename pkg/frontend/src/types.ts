/** Shapes of the service's JSON responses. Field names mirror the API. */

export interface WhatIfResponse {
  artifact_hash: string;
  predicted_total: number;
  reference_predicted: number;
  improvement: number;
}

export interface ImportanceEntry {
  feature: string;
  gain_share: number;
}

export interface ImportanceResponse {
  artifact_hash: string;
  importance: ImportanceEntry[];
}

/** [fraction_i, fraction_j, predicted_total] */
export type HeatmapCell = [number, number, number];

export interface HeatmapResponse {
  artifact_hash: string;
  well_i: string;
  well_j: string;
  step: number;
  cells: HeatmapCell[];
  current_cell: [number, number];
  optimal_cell: [number, number];
  residual_policy: Record<string, number>;
}

export interface MonthlyRow {
  month: string;
  actual: number;
  predicted: number;
  rel_error: number | null;
  within_band: boolean;
  zero_actual: boolean;
}

export interface MonthlyResponse {
  artifact_hash: string;
  months: MonthlyRow[];
}

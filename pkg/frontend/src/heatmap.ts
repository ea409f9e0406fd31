/**
 * Pure heatmap logic: color mapping, cell lookup and the click-to-sliders
 * feedback loop. Cell values are rendered exactly as the service sent them;
 * nothing is recomputed client-side.
 */
import { HeatmapCell, HeatmapResponse } from "./types.js";

export interface RenderedCell {
  fractionI: number;
  fractionJ: number;
  value: number;
  /** 0..1 position on the monotone color scale */
  intensity: number;
  color: string;
  isCurrent: boolean;
  isOptimal: boolean;
}

/** Monotone blue-to-red scale; the maximum maps to the top of the scale. */
export function colorFor(intensity: number): string {
  const t = Math.min(Math.max(intensity, 0), 1);
  const r = Math.round(40 + 215 * t);
  const g = Math.round(60 + 40 * (1 - Math.abs(2 * t - 1)));
  const b = Math.round(255 - 215 * t);
  return `rgb(${r},${g},${b})`;
}

export function renderCells(grid: HeatmapResponse): RenderedCell[] {
  const values = grid.cells.map((c) => c[2]);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo;
  return grid.cells.map(([fi, fj, value]) => {
    const intensity = span > 0 ? (value - lo) / span : 1;
    return {
      fractionI: fi,
      fractionJ: fj,
      value,
      intensity,
      color: colorFor(intensity),
      isCurrent: fi === grid.current_cell[0] && fj === grid.current_cell[1],
      isOptimal: fi === grid.optimal_cell[0] && fj === grid.optimal_cell[1],
    };
  });
}

export function findCell(grid: HeatmapResponse, fi: number, fj: number): HeatmapCell | undefined {
  const eps = grid.step / 2;
  return grid.cells.find((c) => Math.abs(c[0] - fi) < eps && Math.abs(c[1] - fj) < eps);
}

/**
 * The full allocation a cell stands for: the two axis wells take the cell's
 * fractions, the leftover goes to the residual wells per the service's
 * residual policy.
 */
export function cellFractions(grid: HeatmapResponse, cell: HeatmapCell): Record<string, number> {
  const [fi, fj] = cell;
  const out: Record<string, number> = { [grid.well_i]: fi, [grid.well_j]: fj };
  const leftover = 1 - fi - fj;
  for (const [well, share] of Object.entries(grid.residual_policy)) {
    out[well] = leftover * share;
  }
  return out;
}

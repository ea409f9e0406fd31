import { describe, expect, it } from "vitest";

import { largestRemainder } from "../src/allocation.js";
import { cellFractions, colorFor, findCell, renderCells } from "../src/heatmap.js";
import { HeatmapCell, HeatmapResponse } from "../src/types.js";

function gridOf(step: number, extra: Partial<HeatmapResponse> = {}): HeatmapResponse {
  const cells: HeatmapCell[] = [];
  const n = Math.round(1 / step);
  for (let i = 0; i <= n; i++) {
    for (let j = 0; i + j <= n; j++) {
      const fi = i * step;
      const fj = j * step;
      // single interior peak so min/max are unambiguous
      cells.push([fi, fj, 1000 - 500 * ((fi - 0.27) ** 2 + (fj - 0.04) ** 2)]);
    }
  }
  return {
    artifact_hash: "abc123def456",
    well_i: "Infill Well 1",
    well_j: "Infill Well 2",
    step,
    cells,
    current_cell: [0.3, 0.3],
    optimal_cell: [0.27, 0.04],
    residual_policy: { "Infill Well 3": 1 },
    ...extra,
  };
}

describe("renderCells", () => {
  it("renders every payload value exactly, never recomputed", () => {
    const grid = gridOf(0.1);
    const rendered = renderCells(grid);
    expect(rendered).toHaveLength(grid.cells.length);
    for (let k = 0; k < rendered.length; k++) {
      expect(rendered[k].value).toBe(grid.cells[k][2]);
      expect(rendered[k].fractionI).toBe(grid.cells[k][0]);
      expect(rendered[k].fractionJ).toBe(grid.cells[k][1]);
    }
  });

  it("gives the maximum cell full intensity and the minimum zero", () => {
    const grid = gridOf(0.01);
    const rendered = renderCells(grid);
    const byValue = [...rendered].sort((a, b) => a.value - b.value);
    expect(byValue[byValue.length - 1].intensity).toBe(1);
    expect(byValue[0].intensity).toBe(0);
  });

  it("intensity is monotone in the cell value", () => {
    const rendered = renderCells(gridOf(0.05));
    const byValue = [...rendered].sort((a, b) => a.value - b.value);
    for (let k = 1; k < byValue.length; k++) {
      expect(byValue[k].intensity).toBeGreaterThanOrEqual(byValue[k - 1].intensity);
    }
  });

  it("marks exactly the current and optimal cells", () => {
    const rendered = renderCells(gridOf(0.01));
    const current = rendered.filter((c) => c.isCurrent);
    const optimal = rendered.filter((c) => c.isOptimal);
    expect(current).toHaveLength(1);
    expect([current[0].fractionI, current[0].fractionJ]).toEqual([0.3, 0.3]);
    expect(optimal).toHaveLength(1);
    expect([optimal[0].fractionI, optimal[0].fractionJ]).toEqual([0.27, 0.04]);
  });

  it("flat grids fall back to a single full-intensity color", () => {
    const flat = gridOf(0.5);
    flat.cells = flat.cells.map(([i, j]) => [i, j, 42]);
    for (const cell of renderCells(flat)) expect(cell.intensity).toBe(1);
  });
});

describe("colorFor", () => {
  it("is monotone from blue to red channel-wise", () => {
    let prevR = -1;
    let prevB = 256;
    for (let t = 0; t <= 1.0001; t += 0.05) {
      const m = colorFor(t).match(/rgb\((\d+),(\d+),(\d+)\)/)!;
      const r = Number(m[1]);
      const b = Number(m[3]);
      expect(r).toBeGreaterThanOrEqual(prevR);
      expect(b).toBeLessThanOrEqual(prevB);
      prevR = r;
      prevB = b;
    }
  });

  it("clamps out-of-range intensities", () => {
    expect(colorFor(-1)).toBe(colorFor(0));
    expect(colorFor(2)).toBe(colorFor(1));
  });
});

describe("findCell", () => {
  it("finds a cell despite floating-point fraction noise", () => {
    const grid = gridOf(0.01);
    const cell = findCell(grid, 0.27000000000000002, 0.04);
    expect(cell).toBeDefined();
    expect(cell![0]).toBe(0.27);
    expect(cell![1]).toBe(0.04);
  });

  it("returns undefined off the simplex", () => {
    expect(findCell(gridOf(0.01), 0.9, 0.9)).toBeUndefined();
  });
});

describe("cell click to slider percents", () => {
  it("clicking the optimal cell yields 27 / 4 / 69", () => {
    const grid = gridOf(0.01);
    const cell = findCell(grid, 0.27, 0.04)!;
    const fractions = cellFractions(grid, cell);
    expect(fractions["Infill Well 1"]).toBeCloseTo(0.27, 12);
    expect(fractions["Infill Well 2"]).toBeCloseTo(0.04, 12);
    expect(fractions["Infill Well 3"]).toBeCloseTo(0.69, 12);
    const wells = ["Infill Well 1", "Infill Well 2", "Infill Well 3"];
    const percents = largestRemainder(wells.map((w) => fractions[w]), 100);
    expect(percents).toEqual([27, 4, 69]);
  });

  it("splits the leftover across residual wells per the service policy", () => {
    const grid = gridOf(0.01, {
      residual_policy: { "Infill Well 3": 0.75, "Infill Well 4": 0.25 },
    });
    const fractions = cellFractions(grid, [0.2, 0.2, 0]);
    expect(fractions["Infill Well 3"]).toBeCloseTo(0.45, 12);
    expect(fractions["Infill Well 4"]).toBeCloseTo(0.15, 12);
    const total = Object.values(fractions).reduce((a, b) => a + b, 0);
    expect(total).toBeCloseTo(1, 12);
  });

  it("a corner cell routes everything to the axis well", () => {
    const grid = gridOf(0.01);
    const fractions = cellFractions(grid, [1, 0, 0]);
    expect(fractions["Infill Well 1"]).toBe(1);
    expect(fractions["Infill Well 2"]).toBe(0);
    expect(fractions["Infill Well 3"]).toBeCloseTo(0, 12);
  });
});

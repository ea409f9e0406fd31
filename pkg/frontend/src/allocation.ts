/**
 * Slider state for one pad's steam allocation.
 *
 * Percentages are integers and always sum to exactly 100 after every
 * operation (largest-remainder rounding). Locked wells keep their value
 * and are excluded from renormalization.
 */

export interface WellControl {
  well: string;
  percent: number;
  locked: boolean;
}

export interface AllocationState {
  wells: WellControl[];
}

/**
 * Distribute `total` integer units proportionally to `weights` using
 * largest-remainder rounding. Ties go to the lower index; an all-zero
 * weight vector splits evenly.
 */
export function largestRemainder(weights: number[], total: number): number[] {
  if (weights.length === 0) return [];
  const sum = weights.reduce((a, b) => a + b, 0);
  const shares =
    sum > 0 ? weights.map((w) => (w / sum) * total) : weights.map(() => total / weights.length);
  const out = shares.map(Math.floor);
  let leftover = total - out.reduce((a, b) => a + b, 0);
  const byRemainder = shares
    .map((s, i) => [s - Math.floor(s), i] as const)
    .sort((a, b) => b[0] - a[0] || a[1] - b[1]);
  for (let n = 0; n < leftover; n++) out[byRemainder[n][1]] += 1;
  return out;
}

export function initialState(wells: string[]): AllocationState {
  const percents = largestRemainder(wells.map(() => 1), 100);
  return { wells: wells.map((well, i) => ({ well, percent: percents[i], locked: false })) };
}

function lockedSum(state: AllocationState, except?: string): number {
  return state.wells
    .filter((w) => w.locked && w.well !== except)
    .reduce((a, w) => a + w.percent, 0);
}

/**
 * Renormalize so the percentages sum to exactly 100. Locked wells (and the
 * optional pinned well, typically the one the user just moved) keep their
 * value; the rest absorb the leftover proportionally.
 */
export function normalize(state: AllocationState, pinned?: string): AllocationState {
  const fixed = state.wells.filter((w) => w.locked || w.well === pinned);
  const free = state.wells.filter((w) => !w.locked && w.well !== pinned);
  const fixedTotal = fixed.reduce((a, w) => a + w.percent, 0);
  if (free.length === 0) {
    // nothing adjustable: force the sum by rescaling every well
    const percents = largestRemainder(state.wells.map((w) => w.percent), 100);
    return { wells: state.wells.map((w, i) => ({ ...w, percent: percents[i] })) };
  }
  const leftover = Math.max(0, 100 - fixedTotal);
  const percents = largestRemainder(free.map((w) => w.percent), leftover);
  const byWell = new Map(free.map((w, i) => [w.well, percents[i]]));
  return {
    wells: state.wells.map((w) => (byWell.has(w.well) ? { ...w, percent: byWell.get(w.well)! } : w)),
  };
}

/** Move one slider; the moved value is clamped to what locked wells leave. */
export function setPercent(state: AllocationState, well: string, value: number): AllocationState {
  const capacity = 100 - lockedSum(state, well);
  const clamped = Math.min(Math.max(Math.round(value), 0), capacity);
  const next = {
    wells: state.wells.map((w) => (w.well === well ? { ...w, percent: clamped } : w)),
  };
  return normalize(next, well);
}

export function toggleLock(state: AllocationState, well: string): AllocationState {
  const next = {
    wells: state.wells.map((w) => (w.well === well ? { ...w, locked: !w.locked } : w)),
  };
  return normalize(next);
}

/** Load fractions (e.g. from a heatmap cell) into the sliders, clearing locks. */
export function fromFractions(
  state: AllocationState,
  fractions: Record<string, number>,
): AllocationState {
  const weights = state.wells.map((w) => fractions[w.well] ?? 0);
  const percents = largestRemainder(weights, 100);
  return {
    wells: state.wells.map((w, i) => ({ ...w, percent: percents[i], locked: false })),
  };
}

/** The simplex point the sliders describe, for the what-if request body. */
export function fractionsOf(state: AllocationState): Record<string, number> {
  const out: Record<string, number> = {};
  for (const w of state.wells) out[w.well] = w.percent / 100;
  return out;
}

export function percentSum(state: AllocationState): number {
  return state.wells.reduce((a, w) => a + w.percent, 0);
}

/** Pure client-side diff of two projection runs.
 *
 * Everything here is arithmetic on numbers the service already reported;
 * no model logic. Comparing runs from different curricula (different state
 * spaces) is an explicit error, not a silent partial diff.
 */

import type { ProjectionRun } from './types.js';

export interface LoadDelta {
  year: number;
  module: string;
  a: number;
  b: number;
  delta: number; // b - a
}

export interface AbsorptionDelta {
  state: string;
  target: string; // eligible state id or "dropout" or "expected_years"
  a: number;
  b: number;
  delta: number;
}

export interface RunComparison {
  loadDeltas: LoadDelta[];
  absorptionDeltas: AbsorptionDelta[];
  maxAbsLoadDelta: number;
  allZero: boolean;
}

export class StateSpaceMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'StateSpaceMismatch';
  }
}

const sameMembers = (a: string[], b: string[]): boolean => {
  if (a.length !== b.length) return false;
  const sa = [...a].sort();
  const sb = [...b].sort();
  return sa.every((value, i) => value === sb[i]);
};

export function compareRuns(runA: ProjectionRun, runB: ProjectionRun): RunComparison {
  if (!sameMembers(runA.states, runB.states)) {
    throw new StateSpaceMismatch(
      'runs come from different curricula: their state spaces differ, so per-state deltas are undefined',
    );
  }

  const years = new Set<string>([
    ...Object.keys(runA.module_loads),
    ...Object.keys(runB.module_loads),
  ]);
  const loadDeltas: LoadDelta[] = [];
  let maxAbs = 0;
  for (const year of [...years].sort()) {
    const loadsA = runA.module_loads[year] ?? {};
    const loadsB = runB.module_loads[year] ?? {};
    const modules = new Set([...Object.keys(loadsA), ...Object.keys(loadsB)]);
    for (const module of [...modules].sort()) {
      const a = loadsA[module] ?? 0;
      const b = loadsB[module] ?? 0;
      const delta = b - a;
      maxAbs = Math.max(maxAbs, Math.abs(delta));
      loadDeltas.push({ year: Number(year), module, a, b, delta });
    }
  }

  const absorptionDeltas: AbsorptionDelta[] = [];
  const absorptionA = runA.absorption ?? {};
  const absorptionB = runB.absorption ?? {};
  const states = new Set([...Object.keys(absorptionA), ...Object.keys(absorptionB)]);
  for (const state of [...states].sort()) {
    const a = absorptionA[state];
    const b = absorptionB[state];
    if (!a || !b) continue;
    const targets = new Set([...Object.keys(a.eligible), ...Object.keys(b.eligible)]);
    for (const target of [...targets].sort()) {
      const va = a.eligible[target] ?? 0;
      const vb = b.eligible[target] ?? 0;
      absorptionDeltas.push({ state, target, a: va, b: vb, delta: vb - va });
    }
    absorptionDeltas.push({
      state, target: 'dropout', a: a.dropout, b: b.dropout, delta: b.dropout - a.dropout,
    });
    absorptionDeltas.push({
      state,
      target: 'expected_years',
      a: a.expected_years,
      b: b.expected_years,
      delta: b.expected_years - a.expected_years,
    });
  }

  const allZero =
    loadDeltas.every((d) => d.delta === 0) && absorptionDeltas.every((d) => d.delta === 0);
  return { loadDeltas, absorptionDeltas, maxAbsLoadDelta: maxAbs, allZero };
}

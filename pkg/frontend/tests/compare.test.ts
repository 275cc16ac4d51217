import { describe, expect, it } from 'vitest';
import golden from './fixtures/service-golden.json';
import { compareRuns, StateSpaceMismatch } from '../src/compare.js';
import type { ProjectionRun } from '../src/types.js';

const baseRun = golden.base_run as ProjectionRun;
const bumpedRun = golden.bumped_run as ProjectionRun;

describe('compareRuns', () => {
  it('identical runs produce all-zero deltas', () => {
    const comparison = compareRuns(baseRun, baseRun);
    expect(comparison.allZero).toBe(true);
    expect(comparison.maxAbsLoadDelta).toBe(0);
    expect(comparison.loadDeltas.every((d) => d.delta === 0)).toBe(true);
    expect(comparison.absorptionDeltas.every((d) => d.delta === 0)).toBe(true);
  });

  it('higher first-module dropout never raises downstream loads', () => {
    const comparison = compareRuns(baseRun, bumpedRun);
    expect(comparison.allZero).toBe(false);
    for (const delta of comparison.loadDeltas) {
      if (delta.module !== '50') {
        expect(delta.delta).toBeLessThanOrEqual(1e-12);
      }
    }
    const dropout = comparison.absorptionDeltas.find(
      (d) => d.state === 'start' && d.target === 'dropout',
    )!;
    expect(dropout.delta).toBeGreaterThan(0);
  });

  it('deltas recompute identically after JSON round-trip (page reload)', () => {
    const thawedA = JSON.parse(JSON.stringify(baseRun)) as ProjectionRun;
    const thawedB = JSON.parse(JSON.stringify(bumpedRun)) as ProjectionRun;
    const before = compareRuns(baseRun, bumpedRun);
    const after = compareRuns(thawedA, thawedB);
    expect(after).toEqual(before);
  });

  it('rejects runs over different state spaces', () => {
    const other = {
      ...baseRun,
      states: baseRun.states.slice(0, 5),
    } as ProjectionRun;
    expect(() => compareRuns(baseRun, other)).toThrow(StateSpaceMismatch);
    expect(() => compareRuns(baseRun, other)).toThrow(/different curricula/);
  });
});

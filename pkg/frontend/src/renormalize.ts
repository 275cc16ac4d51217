/** Client-side renormalization, matching the service's renormalize mode.
 *
 * The service scales the untouched outcomes of an edited row by
 * (1 - overridden mass) / (their prior mass); when the untouched prior mass
 * is zero the remainder is spread evenly over the untouched outcomes in
 * state-id order. The UI performs no other model math: a draft row shown
 * here must equal the effective row the service reports back, to 1e-9.
 */

import type { AssignmentEntry } from './types.js';
import { outcomeKey } from './types.js';

export interface RowOutcome {
  key: string;
  entry: AssignmentEntry;
  probability: number;
}

const TOLERANCE = 1e-9;

/** Group a flat assignment by state id, preserving service row order. */
export function groupByState(entries: AssignmentEntry[]): Map<string, AssignmentEntry[]> {
  const grouped = new Map<string, AssignmentEntry[]>();
  for (const entry of entries) {
    const row = grouped.get(entry.from_state_id) ?? [];
    row.push(entry);
    grouped.set(entry.from_state_id, row);
  }
  return grouped;
}

/**
 * Apply the overrides for one state and return the full effective row.
 *
 * `row` is the state's prior outcomes; `overrides` maps outcome keys to new
 * probabilities. Throws on negative values, overrides above unit mass, or
 * unassignable remainders, mirroring the service's 422s.
 */
export function renormalizeRow(
  row: AssignmentEntry[],
  overrides: Map<string, number>,
): AssignmentEntry[] {
  for (const [key, value] of overrides) {
    if (!Number.isFinite(value) || value < 0 || value > 1) {
      throw new Error(`probability ${value} out of range for ${key}`);
    }
    if (!row.some((entry) => outcomeKey(entry) === key)) {
      throw new Error(`no outcome ${key} in this row`);
    }
  }
  let overriddenMass = 0;
  for (const value of overrides.values()) overriddenMass += value;
  if (overriddenMass > 1 + TOLERANCE) {
    throw new Error(`overrides sum to ${overriddenMass}, above 1`);
  }

  const untouched = row.filter((entry) => !overrides.has(outcomeKey(entry)));
  const remainder = Math.max(0, 1 - overriddenMass);
  let priorMass = 0;
  for (const entry of untouched) priorMass += entry.probability;

  return row.map((entry) => {
    const key = outcomeKey(entry);
    if (overrides.has(key)) {
      return { ...entry, probability: overrides.get(key)! };
    }
    if (priorMass > 0) {
      const scale = remainder / priorMass;
      return { ...entry, probability: entry.probability === 0 ? 0 : entry.probability * scale };
    }
    if (remainder > TOLERANCE) {
      if (untouched.length === 0) {
        throw new Error(`cannot place remaining mass ${remainder}`);
      }
      return { ...entry, probability: remainder / untouched.length };
    }
    return { ...entry, probability: 0 };
  });
}

/** Effective full assignment for a draft: base entries + per-state overrides. */
export function effectiveAssignment(
  base: AssignmentEntry[],
  overrides: Map<string, Map<string, number>>,
): AssignmentEntry[] {
  const grouped = groupByState(base);
  const out: AssignmentEntry[] = [];
  for (const [state, row] of grouped) {
    const stateOverrides = overrides.get(state);
    if (!stateOverrides || stateOverrides.size === 0) {
      out.push(...row);
      continue;
    }
    out.push(...renormalizeRow(row, stateOverrides));
  }
  return out;
}

/** True when two assignments agree on every probability within 1e-9. */
export function assignmentsAgree(a: AssignmentEntry[], b: AssignmentEntry[]): boolean {
  if (a.length !== b.length) return false;
  const index = new Map<string, number>();
  for (const entry of a) index.set(`${entry.from_state_id}|${outcomeKey(entry)}`, entry.probability);
  for (const entry of b) {
    const mine = index.get(`${entry.from_state_id}|${outcomeKey(entry)}`);
    if (mine === undefined || Math.abs(mine - entry.probability) > TOLERANCE) return false;
  }
  return true;
}

/** Row sum, for inline display/validation. */
export function rowSum(row: AssignmentEntry[]): number {
  let total = 0;
  for (const entry of row) total += entry.probability;
  return total;
}

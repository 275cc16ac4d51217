/** Client-side scenario view: the saved scenario, local draft edits, and
 * the latest run results.
 *
 * Drafts never leave the browser until a run or save is requested, and the
 * editor always shows the renormalized effective row, never raw edits.
 * Runs are labeled with the scenario version and the effective-assignment
 * hash so two result panels are always attributable.
 */

import type { AssignmentEntry, ProjectionRun, Scenario } from './types.js';
import { effectiveAssignment, groupByState, renormalizeRow } from './renormalize.js';
import { assignmentHash } from './hash.js';

export interface RunLabel {
  scenarioVersion: number;
  assignmentHash: string;
  startedAt: string;
}

export interface LabeledRun {
  label: RunLabel;
  run: ProjectionRun;
}

export class ScenarioView {
  scenario: Scenario;
  /** state id -> outcome key -> draft probability */
  readonly overrides = new Map<string, Map<string, number>>();
  scheduleDraft: Record<string, number>;
  horizonDraft: number;
  lastRun: LabeledRun | null = null;
  comparisonRun: LabeledRun | null = null;

  constructor(scenario: Scenario) {
    this.scenario = scenario;
    this.scheduleDraft = { ...scenario.schedule };
    this.horizonDraft = scenario.horizon;
  }

  get dirty(): boolean {
    return (
      [...this.overrides.values()].some((row) => row.size > 0) ||
      this.horizonDraft !== this.scenario.horizon ||
      JSON.stringify(this.scheduleDraft) !== JSON.stringify(this.scenario.schedule)
    );
  }

  /** Record one probability edit; throws when the edit cannot be placed. */
  editProbability(stateId: string, outcomeKeyStr: string, value: number): void {
    const row = groupByState(this.scenario.assignment).get(stateId);
    if (!row) throw new Error(`no state ${stateId}`);
    const draft = new Map(this.overrides.get(stateId) ?? []);
    draft.set(outcomeKeyStr, value);
    renormalizeRow(row, draft); // validates; throws on bad values
    this.overrides.set(stateId, draft);
  }

  clearOverrides(stateId?: string): void {
    if (stateId === undefined) this.overrides.clear();
    else this.overrides.delete(stateId);
  }

  /** The full renormalized row exactly as the service will compute it. */
  effectiveRow(stateId: string): AssignmentEntry[] {
    const row = groupByState(this.scenario.assignment).get(stateId) ?? [];
    const draft = this.overrides.get(stateId);
    if (!draft || draft.size === 0) return row;
    return renormalizeRow(row, draft);
  }

  effectiveDraftAssignment(): AssignmentEntry[] {
    return effectiveAssignment(this.scenario.assignment, this.overrides);
  }

  /** Flat override entries for the service's project body. */
  overrideEntries(): AssignmentEntry[] {
    const entries: AssignmentEntry[] = [];
    for (const [stateId, draft] of this.overrides) {
      for (const [key, probability] of draft) {
        const [outcome, joined] = key.split(':');
        entries.push({
          from_state_id: stateId,
          outcome: outcome as AssignmentEntry['outcome'],
          target_selection: joined ? joined.split(';') : [],
          probability,
        });
      }
    }
    return entries;
  }

  labelRun(run: ProjectionRun): LabeledRun {
    return {
      label: {
        scenarioVersion: this.scenario.version,
        assignmentHash: assignmentHash(run.effective_assignment),
        startedAt: new Date().toISOString(),
      },
      run,
    };
  }
}

/** Wire types mirroring the scenario service's JSON bodies. */

export interface AssignmentEntry {
  from_state_id: string;
  outcome: 'advance' | 'repeat' | 'dropout';
  target_selection: string[];
  probability: number;
}

export interface Scenario {
  id: string;
  name: string;
  curriculum_source: string;
  assignment: AssignmentEntry[];
  schedule: Record<string, number>;
  horizon: number;
  version: number;
}

export interface ScenarioPayload {
  name: string;
  curriculum_source: string;
  assignment: AssignmentEntry[];
  schedule: Record<string, number>;
  horizon: number;
}

export interface YearPopulations {
  year: number;
  values: Record<string, number>;
}

export interface AbsorptionInfo {
  eligible: Record<string, number>;
  dropout: number;
  expected_years: number;
}

export interface ProjectionRun {
  states: string[];
  populations: YearPopulations[];
  module_loads: Record<string, Record<string, number>>;
  absorption: Record<string, AbsorptionInfo> | null;
  effective_assignment: AssignmentEntry[];
}

export interface SimulationCell {
  year: number;
  state: string;
  count: number;
  mean: number;
  se: number;
}

export interface SimulationSummary {
  seed: number;
  replicas: number;
  years: number[];
  cells: SimulationCell[];
  module_loads: Record<string, Record<string, number>>;
}

export interface RefinedGraph {
  states: { id: string; tag: string; taken: string[]; current: string[] }[];
  edges: { from: number; to: number; label: { kind: string; selection: string[] } }[];
}

export interface AggregateGraph {
  states: { id: string; taken: string[] }[];
  edges: { from: number; to: number; labels: string[] }[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown[];
}

/** One outcome of one state, as the editor addresses it. */
export interface OutcomeRef {
  state: string;
  outcome: AssignmentEntry['outcome'];
  selection: string[];
}

export const outcomeKey = (o: { outcome: string; selection?: string[]; target_selection?: string[] }): string => {
  const sel = o.selection ?? o.target_selection ?? [];
  return `${o.outcome}:${[...sel].sort().join(';')}`;
};

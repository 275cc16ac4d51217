/** Typed client for the scenario service. All state flows through the
 * documented HTTP API; there are no other channels. */

import type {
  AggregateGraph,
  ApiErrorBody,
  AssignmentEntry,
  ProjectionRun,
  RefinedGraph,
  Scenario,
  ScenarioPayload,
  SimulationSummary,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown[];

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = 'ApiError';
    this.status = status;
    this.code = body.code;
    this.details = body.details ?? [];
  }

  get isVersionConflict(): boolean {
    return this.status === 409;
  }
}

export interface ProjectOptions {
  assignment?: AssignmentEntry[];
  schedule?: Record<string, number>;
  horizon?: number;
  renormalize?: boolean;
}

type Fetch = typeof fetch;

export class ScenarioApi {
  constructor(
    private readonly base: string = '',
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) return undefined as T;
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = { code: 'unknown', message: response.statusText, details: [] };
      }
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  listScenarios(): Promise<Scenario[]> {
    return this.request('GET', '/scenarios');
  }

  getScenario(id: string): Promise<Scenario> {
    return this.request('GET', `/scenarios/${id}`);
  }

  createScenario(payload: ScenarioPayload): Promise<Scenario> {
    return this.request('POST', '/scenarios', payload);
  }

  updateScenario(id: string, expectedVersion: number, payload: ScenarioPayload): Promise<Scenario> {
    return this.request('PUT', `/scenarios/${id}`, {
      ...payload,
      expected_version: expectedVersion,
    });
  }

  deleteScenario(id: string): Promise<void> {
    return this.request('DELETE', `/scenarios/${id}`);
  }

  project(id: string, options: ProjectOptions = {}): Promise<ProjectionRun> {
    return this.request('POST', `/scenarios/${id}/project`, options);
  }

  simulate(id: string, replicas: number, seed: number, horizon?: number): Promise<SimulationSummary> {
    return this.request('POST', `/scenarios/${id}/simulate`, { replicas, seed, horizon });
  }

  refinedGraph(id: string): Promise<RefinedGraph> {
    return this.request('GET', `/scenarios/${id}/graph?view=refined`);
  }

  aggregateGraph(id: string): Promise<AggregateGraph> {
    return this.request('GET', `/scenarios/${id}/graph?view=aggregate`);
  }
}

import { describe, expect, it, vi } from 'vitest';
import { ApiError, ScenarioApi } from '../src/api.js';

function mockFetch(status: number, body: unknown) {
  return vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => body,
    url: String(url),
    init,
  })) as unknown as typeof fetch;
}

describe('ScenarioApi', () => {
  it('hits the documented endpoints', async () => {
    const fetchImpl = mockFetch(200, []);
    const api = new ScenarioApi('http://svc', fetchImpl);
    await api.listScenarios();
    await api.project('abc', { renormalize: true });
    await api.simulate('abc', 100, 7);
    await api.aggregateGraph('abc');
    const calls = (fetchImpl as unknown as { mock: { calls: [string, RequestInit?][] } }).mock.calls;
    expect(calls.map((c) => String(c[0]))).toEqual([
      'http://svc/scenarios',
      'http://svc/scenarios/abc/project',
      'http://svc/scenarios/abc/simulate',
      'http://svc/scenarios/abc/graph?view=aggregate',
    ]);
    expect(calls[1][1]?.method).toBe('POST');
    expect(JSON.parse(String(calls[2][1]?.body))).toEqual({
      replicas: 100,
      seed: 7,
      horizon: undefined,
    });
  });

  it('passes expected_version on update', async () => {
    const fetchImpl = mockFetch(200, { id: 'abc', version: 3 });
    const api = new ScenarioApi('', fetchImpl);
    await api.updateScenario('abc', 2, {
      name: 'x',
      curriculum_source: 's',
      assignment: [],
      schedule: {},
      horizon: 1,
    });
    const calls = (fetchImpl as unknown as { mock: { calls: [string, RequestInit?][] } }).mock.calls;
    expect(JSON.parse(String(calls[0][1]?.body)).expected_version).toBe(2);
  });

  it('maps error bodies to ApiError with conflict detection', async () => {
    const api = new ScenarioApi(
      '',
      mockFetch(409, { code: 'version-conflict', message: 'stale', details: [] }),
    );
    const error = await api.getScenario('abc').catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).code).toBe('version-conflict');
    expect((error as ApiError).isVersionConflict).toBe(true);
  });

  it('treats 204 as empty success', async () => {
    const api = new ScenarioApi('', mockFetch(204, null));
    await expect(api.deleteScenario('abc')).resolves.toBeUndefined();
  });
});

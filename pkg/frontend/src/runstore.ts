/** Page-local persistence of run results (localStorage), so comparisons
 * can be rebuilt identically after a reload. */

import type { LabeledRun } from './state.js';

const KEY = 'pathcast.runs.v1';
const LIMIT = 20; // runs kept per scenario

type Stored = Record<string, LabeledRun[]>;

function readAll(storage: Storage): Stored {
  try {
    return JSON.parse(storage.getItem(KEY) ?? '{}') as Stored;
  } catch {
    return {};
  }
}

export class RunStore {
  constructor(private readonly storage: Storage) {}

  list(scenarioId: string): LabeledRun[] {
    return readAll(this.storage)[scenarioId] ?? [];
  }

  push(scenarioId: string, run: LabeledRun): void {
    const all = readAll(this.storage);
    const runs = all[scenarioId] ?? [];
    runs.unshift(run);
    all[scenarioId] = runs.slice(0, LIMIT);
    this.storage.setItem(KEY, JSON.stringify(all));
  }

  clear(scenarioId: string): void {
    const all = readAll(this.storage);
    delete all[scenarioId];
    this.storage.setItem(KEY, JSON.stringify(all));
  }
}

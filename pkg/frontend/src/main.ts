import './styles.css';
import { ApiError, ScenarioApi } from './api.js';
import { compareRuns, StateSpaceMismatch, type RunComparison } from './compare.js';
import { aggregateGraphSvg } from './graphview.js';
import { ScenarioView, type LabeledRun } from './state.js';
import { RunStore } from './runstore.js';
import {
  chartCsv,
  downloadBlob,
  downloadSvgAsPng,
} from './charts.js';
import {
  loadSeries,
  populationSeries,
  renderComparison,
  renderConflictBanner,
  renderEditor,
  renderIntakes,
  renderRun,
  renderScenarioList,
} from './ui.js';
import type { Scenario } from './types.js';

const api = new ScenarioApi(import.meta.env?.VITE_API_BASE ?? '');
const runStore = new RunStore(window.localStorage);

let scenarios: Scenario[] = [];
let view: ScenarioView | null = null;
let activeTab = 'graph';
let compareA = 0;
let compareB = 1;
let conflict = false;

const $ = (selector: string): HTMLElement => document.querySelector(selector)!;

function toast(message: string, isError = false): void {
  const node = $('#toast');
  node.textContent = message;
  node.className = isError ? 'show error' : 'show';
  setTimeout(() => (node.className = ''), 4000);
}

async function refreshScenarios(selectId?: string): Promise<void> {
  scenarios = await api.listScenarios();
  const targetId = selectId ?? view?.scenario.id ?? scenarios[0]?.id ?? null;
  if (targetId) {
    const scenario = scenarios.find((s) => s.id === targetId);
    if (scenario && (!view || view.scenario.id !== scenario.id || view.scenario.version !== scenario.version)) {
      view = new ScenarioView(scenario);
      conflict = false;
    }
  } else {
    view = null;
  }
  render();
}

function currentRuns(): LabeledRun[] {
  return view ? runStore.list(view.scenario.id) : [];
}

function render(): void {
  $('#scenarios').innerHTML = renderScenarioList(scenarios, view?.scenario.id ?? null);
  const main = $('#panel');
  if (!view) {
    main.innerHTML = '<p class="hint">Select a scenario.</p>';
    return;
  }
  const runs = currentRuns();
  $('#scenario-title').textContent = `${view.scenario.name} (v${view.scenario.version})`;
  ($('#tab-bar') as HTMLElement).dataset.active = activeTab;

  let body = '';
  if (conflict) body += renderConflictBanner();
  switch (activeTab) {
    case 'graph':
      body += '<div id="graph-host" class="chart"><p class="hint">loading…</p></div>';
      break;
    case 'probabilities':
      body += `<p class="hint">Draft edits renormalize the rest of the row live; nothing is sent until you run or save.</p>${renderEditor(view)}`;
      break;
    case 'intakes':
      body += renderIntakes(view);
      break;
    case 'results':
      body += `
        <p>
          <button id="run-projection">Run projection${view.dirty ? ' (draft)' : ''}</button>
          <button id="run-simulation" class="small">Monte Carlo check</button>
          replicas <input id="replicas" type="number" value="20000" style="width:6em">
          seed <input id="seed" type="number" value="1" style="width:5em">
          ${view.dirty ? '<button id="save-draft" class="small">save draft to scenario</button>' : ''}
        </p>
        <div id="run-host">${runs[0] ? renderRun(runs[0]) : '<p class="hint">No runs yet.</p>'}</div>`;
      break;
    case 'compare': {
      let comparison: RunComparison | null = null;
      let error: string | null = null;
      if (runs.length >= 2) {
        try {
          comparison = compareRuns(runs[compareA]?.run, runs[compareB]?.run);
        } catch (exc) {
          error = exc instanceof StateSpaceMismatch ? exc.message : String(exc);
        }
      }
      body += renderComparison(runs, compareA, compareB, comparison, error);
      break;
    }
  }
  main.innerHTML = body;
  if (activeTab === 'graph') void loadGraph();
}

async function loadGraph(): Promise<void> {
  if (!view) return;
  try {
    const graph = await api.aggregateGraph(view.scenario.id);
    const host = document.querySelector('#graph-host');
    if (host) host.innerHTML = aggregateGraphSvg(graph);
  } catch (exc) {
    toast(`graph: ${exc}`, true);
  }
}

async function runProjection(): Promise<void> {
  if (!view) return;
  try {
    const run = await api.project(view.scenario.id, {
      assignment: view.overrideEntries(),
      schedule: view.scheduleDraft,
      horizon: view.horizonDraft,
      renormalize: true,
    });
    const labeled = view.labelRun(run);
    runStore.push(view.scenario.id, labeled);
    toast(`projection done · assignment ${labeled.label.assignmentHash}`);
    render();
  } catch (exc) {
    toast(String(exc), true);
  }
}

async function runSimulation(): Promise<void> {
  if (!view) return;
  const replicas = Number(($('#replicas') as HTMLInputElement).value) || 20000;
  const seed = Number(($('#seed') as HTMLInputElement).value) || 1;
  try {
    const summary = await api.simulate(view.scenario.id, replicas, seed);
    toast(`simulated ${summary.replicas} replicas (seed ${summary.seed})`);
  } catch (exc) {
    toast(String(exc), true);
  }
}

async function saveDraft(): Promise<void> {
  if (!view) return;
  try {
    const updated = await api.updateScenario(view.scenario.id, view.scenario.version, {
      name: view.scenario.name,
      curriculum_source: view.scenario.curriculum_source,
      assignment: view.effectiveDraftAssignment(),
      schedule: view.scheduleDraft,
      horizon: view.horizonDraft,
    });
    toast(`saved as version ${updated.version}`);
    await refreshScenarios(updated.id);
  } catch (exc) {
    if (exc instanceof ApiError && exc.isVersionConflict) {
      conflict = true;
      render();
    } else {
      toast(String(exc), true);
    }
  }
}

function exportChart(kind: string): void {
  const runs = currentRuns();
  if (!runs[0]) return;
  const run = runs[0].run;
  if (kind === 'populations-csv') {
    const { years, series } = populationSeries(run);
    downloadBlob('populations.csv', 'text/csv', chartCsv('year', years, series));
  } else if (kind === 'loads-csv') {
    const { years, series } = loadSeries(run);
    downloadBlob('module_loads.csv', 'text/csv', chartCsv('year', years, series));
  } else {
    const host = kind === 'populations-png' ? '#chart-populations' : '#chart-loads';
    const svg = document.querySelector(`${host} svg`);
    if (svg) {
      downloadSvgAsPng(
        kind === 'populations-png' ? 'populations.png' : 'module_loads.png',
        svg.outerHTML,
        Number(svg.getAttribute('width')),
        Number(svg.getAttribute('height')),
      );
    }
  }
}

function wireEvents(): void {
  $('#scenarios').addEventListener('click', (event) => {
    const button = (event.target as HTMLElement).closest('[data-scenario]') as HTMLElement | null;
    if (button) void refreshScenarios(button.dataset.scenario);
  });

  $('#tab-bar').addEventListener('click', (event) => {
    const tab = (event.target as HTMLElement).closest('[data-tab]') as HTMLElement | null;
    if (tab) {
      activeTab = tab.dataset.tab!;
      render();
    }
  });

  $('#panel').addEventListener('change', (event) => {
    const input = event.target as HTMLInputElement;
    if (!view) return;
    if (input.dataset.state && input.dataset.outcome) {
      try {
        view.editProbability(input.dataset.state, input.dataset.outcome, Number(input.value));
      } catch (exc) {
        toast(String(exc), true);
      }
      render();
    } else if (input.dataset.intakeYear) {
      view.scheduleDraft[input.dataset.intakeYear] = Math.max(0, Number(input.value) || 0);
      render();
    } else if (input.id === 'horizon') {
      view.horizonDraft = Math.max(1, Number(input.value) || 1);
      render();
    } else if (input.id === 'compare-a' || input.id === 'compare-b') {
      if (input.id === 'compare-a') compareA = Number(input.value);
      else compareB = Number(input.value);
      render();
    }
  });

  $('#panel').addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (!view) return;
    if (target.id === 'run-projection') void runProjection();
    else if (target.id === 'run-simulation') void runSimulation();
    else if (target.id === 'save-draft') void saveDraft();
    else if (target.id === 'reload-scenario') void refreshScenarios(view.scenario.id);
    else if (target.dataset.reset) {
      view.clearOverrides(target.dataset.reset);
      render();
    } else if (target.dataset.export) {
      exportChart(target.dataset.export);
    } else if (target.id === 'add-year') {
      const years = Object.keys(view.scheduleDraft).map(Number);
      const next = years.length ? Math.max(...years) + 1 : new Date().getFullYear();
      view.scheduleDraft[String(next)] = 0;
      render();
    } else if (target.dataset.removeYear) {
      delete view.scheduleDraft[target.dataset.removeYear];
      render();
    }
  });
}

wireEvents();
void refreshScenarios().catch((exc) => toast(`cannot reach the service: ${exc}`, true));

/** DOM rendering for the planner views. Pure render-from-state functions;
 * event wiring happens in main.ts via delegated handlers. */

import type { AssignmentEntry, ProjectionRun, Scenario } from './types.js';
import { outcomeKey } from './types.js';
import { groupByState, rowSum } from './renormalize.js';
import type { LabeledRun, ScenarioView } from './state.js';
import type { RunComparison } from './compare.js';
import { stackedAreaChart, lineChart, seriesColor, type Series } from './charts.js';

const esc = (value: string): string =>
  value.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');

export function outcomeLabel(entry: AssignmentEntry): string {
  if (entry.outcome === 'repeat') return 'repeat year';
  if (entry.outcome === 'dropout') return 'drop out';
  if (entry.target_selection.length === 0) return 'advance to thesis';
  return `advance: ${entry.target_selection.join(' + ')}`;
}

export function renderScenarioList(scenarios: Scenario[], selectedId: string | null): string {
  if (scenarios.length === 0) {
    return '<p class="hint">No scenarios in the store yet. Seed one through the service API (see README).</p>';
  }
  return scenarios
    .map(
      (s) => `
      <button class="scenario ${s.id === selectedId ? 'selected' : ''}" data-scenario="${esc(s.id)}">
        <span class="name">${esc(s.name)}</span>
        <span class="meta">v${s.version} · horizon ${s.horizon}</span>
      </button>`,
    )
    .join('');
}

export function renderEditor(view: ScenarioView): string {
  const grouped = groupByState(view.scenario.assignment);
  const sections: string[] = [];
  for (const [stateId, baseRow] of grouped) {
    const effective = view.effectiveRow(stateId);
    const overridden = view.overrides.get(stateId);
    const sum = rowSum(effective);
    const rows = baseRow
      .map((entry, i) => {
        const key = outcomeKey(entry);
        const isEdited = overridden?.has(key) ?? false;
        return `
        <tr class="${isEdited ? 'edited' : ''}">
          <td>${esc(outcomeLabel(entry))}</td>
          <td><input type="number" min="0" max="1" step="0.01"
                 value="${(overridden?.get(key) ?? entry.probability).toFixed(4)}"
                 data-state="${esc(stateId)}" data-outcome="${esc(key)}"></td>
          <td class="effective">${effective[i].probability.toFixed(6)}</td>
        </tr>`;
      })
      .join('');
    sections.push(`
      <details class="state-row" ${overridden?.size ? 'open' : ''}>
        <summary>
          <code>${esc(stateId)}</code>
          <span class="sum ${Math.abs(sum - 1) < 1e-9 ? 'ok' : 'bad'}">Σ ${sum.toFixed(6)}</span>
          ${overridden?.size ? `<button class="small" data-reset="${esc(stateId)}">reset</button>` : ''}
        </summary>
        <table>
          <thead><tr><th>outcome</th><th>draft</th><th>effective</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>
      </details>`);
  }
  return sections.join('');
}

export function renderIntakes(view: ScenarioView): string {
  const years = Object.keys(view.scheduleDraft).sort();
  const rows = years
    .map(
      (year) => `
      <tr>
        <td>${esc(year)}</td>
        <td><input type="number" min="0" step="1" value="${view.scheduleDraft[year]}"
               data-intake-year="${esc(year)}"></td>
        <td><button class="small" data-remove-year="${esc(year)}">remove</button></td>
      </tr>`,
    )
    .join('');
  return `
    <table class="intakes">
      <thead><tr><th>calendar year</th><th>intake</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <p><button id="add-year" class="small">add year</button>
       horizon <input type="number" id="horizon" min="1" value="${view.horizonDraft}" style="width:4.5em"></p>`;
}

export function populationSeries(run: ProjectionRun): { years: number[]; series: Series[] } {
  const years = run.populations.map((p) => p.year);
  // group refined states by cumulative set for a readable stack
  const groupOf = (stateId: string): string => {
    if (stateId === 'start' || stateId === 'dropout') return stateId;
    if (stateId.startsWith('eligible:')) return 'eligible';
    return stateId.split('|')[0];
  };
  const groups = [...new Set(run.states.map(groupOf))];
  const series = groups.map((group) => ({
    label: group,
    values: years.map((_, t) =>
      run.states.reduce(
        (acc, stateId) =>
          groupOf(stateId) === group ? acc + (run.populations[t].values[stateId] ?? 0) : acc,
        0,
      ),
    ),
  }));
  return { years, series };
}

export function loadSeries(run: ProjectionRun): { years: number[]; series: Series[] } {
  const years = Object.keys(run.module_loads).map(Number).sort((a, b) => a - b);
  const modules = [
    ...new Set(years.flatMap((y) => Object.keys(run.module_loads[String(y)] ?? {}))),
  ].sort();
  const series = modules.map((module) => ({
    label: `module ${module}`,
    values: years.map((y) => run.module_loads[String(y)]?.[module] ?? 0),
  }));
  return { years, series };
}

export function renderRun(labeled: LabeledRun): string {
  const { run, label } = labeled;
  const populations = populationSeries(run);
  const loads = loadSeries(run);
  const absorption = run.absorption
    ? `<h3>Absorption from registration</h3>${renderAbsorption(run)}`
    : '';
  const legend = populations.series
    .map(
      (s, i) =>
        `<span class="chip"><i style="background:${seriesColor(i)}"></i>${esc(s.label)}</span>`,
    )
    .join('');
  return `
    <p class="run-label">scenario v${label.scenarioVersion} · assignment <code>${label.assignmentHash}</code> · ${label.startedAt}</p>
    <h3>Populations by stage</h3>
    <div class="chart" id="chart-populations">${stackedAreaChart(populations.years, populations.series)}</div>
    <p class="legend">${legend}</p>
    <h3>Module loads</h3>
    <div class="chart" id="chart-loads">${lineChart(loads.years, loads.series)}</div>
    <p class="legend">${loads.series
      .map(
        (s, i) =>
          `<span class="chip"><i style="background:${seriesColor(i)}"></i>${esc(s.label)}</span>`,
      )
      .join('')}</p>
    <p>
      <button class="small" data-export="populations-csv">populations CSV</button>
      <button class="small" data-export="populations-png">populations PNG</button>
      <button class="small" data-export="loads-csv">loads CSV</button>
      <button class="small" data-export="loads-png">loads PNG</button>
    </p>
    ${absorption}`;
}

function renderAbsorption(run: ProjectionRun): string {
  const info = run.absorption!['start'];
  if (!info) return '';
  const rows = Object.entries(info.eligible)
    .map(
      ([target, p]) =>
        `<tr><td>graduate via ${esc(target.replace('eligible:', ''))}</td><td>${(p * 100).toFixed(2)}%</td></tr>`,
    )
    .join('');
  return `
    <table class="absorption">
      <tbody>
        ${rows}
        <tr><td>drop out</td><td>${(info.dropout * 100).toFixed(2)}%</td></tr>
        <tr><td>expected years to completion</td><td>${info.expected_years.toFixed(2)}</td></tr>
      </tbody>
    </table>`;
}

export function renderComparison(
  runs: LabeledRun[],
  selectionA: number,
  selectionB: number,
  comparison: RunComparison | null,
  error: string | null,
): string {
  if (runs.length < 2) {
    return '<p class="hint">Run at least two projections to compare them.</p>';
  }
  const options = (selected: number) =>
    runs
      .map(
        (r, i) =>
          `<option value="${i}" ${i === selected ? 'selected' : ''}>#${i + 1} · v${r.label.scenarioVersion} · ${r.label.assignmentHash}</option>`,
      )
      .join('');
  let body = '';
  if (error) {
    body = `<p class="error">${esc(error)}</p>`;
  } else if (comparison) {
    if (comparison.allZero) {
      body = '<p class="ok-banner">Identical results: every delta is zero.</p>';
    }
    const loadRows = comparison.loadDeltas
      .filter((d) => d.delta !== 0 || comparison.allZero)
      .slice(0, 60)
      .map(
        (d) => `
        <tr><td>${d.year}</td><td>${esc(d.module)}</td>
            <td>${d.a.toFixed(3)}</td><td>${d.b.toFixed(3)}</td>
            <td class="${d.delta > 0 ? 'pos' : d.delta < 0 ? 'neg' : ''}">${d.delta >= 0 ? '+' : ''}${d.delta.toFixed(3)}</td></tr>`,
      )
      .join('');
    const absorptionRows = comparison.absorptionDeltas
      .filter((d) => d.state === 'start')
      .map(
        (d) => `
        <tr><td>${esc(d.target)}</td><td>${d.a.toFixed(4)}</td><td>${d.b.toFixed(4)}</td>
            <td class="${d.delta > 0 ? 'pos' : d.delta < 0 ? 'neg' : ''}">${d.delta >= 0 ? '+' : ''}${d.delta.toFixed(4)}</td></tr>`,
      )
      .join('');
    body += `
      <h3>Module-load deltas (B − A)</h3>
      <table class="deltas"><thead><tr><th>year</th><th>module</th><th>A</th><th>B</th><th>Δ</th></tr></thead>
      <tbody>${loadRows || '<tr><td colspan="5">all zero</td></tr>'}</tbody></table>
      <h3>Absorption deltas from registration</h3>
      <table class="deltas"><thead><tr><th>target</th><th>A</th><th>B</th><th>Δ</th></tr></thead>
      <tbody>${absorptionRows || '<tr><td colspan="4">n/a</td></tr>'}</tbody></table>`;
  }
  return `
    <p>
      A <select id="compare-a">${options(selectionA)}</select>
      B <select id="compare-b">${options(selectionB)}</select>
    </p>
    ${body}`;
}

export function renderConflictBanner(): string {
  return `
    <div class="conflict">
      Someone else updated this scenario (version conflict).
      <button id="reload-scenario" class="small">reload latest version</button>
    </div>`;
}

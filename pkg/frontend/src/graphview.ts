/** SVG rendering of the aggregate enrollment graph.
 *
 * Nodes are layered by the size of their cumulative module set (start on
 * the left, dropout at the bottom right), which reproduces the familiar
 * left-to-right reading of the enrollment diagram without a layout engine.
 */

import type { AggregateGraph } from './types.js';

interface Position {
  x: number;
  y: number;
}

export function layoutAggregate(
  graph: AggregateGraph,
  width = 860,
  rowHeight = 72,
): Map<number, Position> {
  const layers = new Map<number, number[]>();
  graph.states.forEach((state, index) => {
    const layer = state.id === 'dropout' ? -1 : state.taken.length;
    const bucket = layers.get(layer) ?? [];
    bucket.push(index);
    layers.set(layer, bucket);
  });

  const ordered = [...layers.keys()].filter((l) => l >= 0).sort((a, b) => a - b);
  const positions = new Map<number, Position>();
  const columnW = width / Math.max(1, ordered.length);
  ordered.forEach((layer, column) => {
    const members = layers.get(layer)!;
    members.forEach((stateIndex, row) => {
      positions.set(stateIndex, {
        x: columnW * column + columnW / 2,
        y: 48 + row * rowHeight,
      });
    });
  });
  const maxY = Math.max(48, ...[...positions.values()].map((p) => p.y));
  for (const stateIndex of layers.get(-1) ?? []) {
    positions.set(stateIndex, { x: width - columnW / 2, y: maxY + rowHeight });
  }
  return positions;
}

export function aggregateGraphSvg(graph: AggregateGraph, width = 860): string {
  const positions = layoutAggregate(graph, width);
  const height = Math.max(...[...positions.values()].map((p) => p.y)) + 56;

  const edges = graph.edges
    .filter((edge) => edge.from !== edge.to)
    .map((edge) => {
      const a = positions.get(edge.from)!;
      const b = positions.get(edge.to)!;
      const advance = edge.labels.some((label) => label.startsWith('advance'));
      const stroke = advance ? '#4269d0' : '#bbb';
      const dash = advance ? '' : ' stroke-dasharray="4 3"';
      const midX = (a.x + b.x) / 2;
      const midY = (a.y + b.y) / 2 - 14;
      return (
        `<path d="M ${a.x} ${a.y} Q ${midX} ${midY} ${b.x} ${b.y}" fill="none" stroke="${stroke}"${dash} marker-end="url(#arrow)">` +
        `<title>${edge.labels.join('\n')}</title></path>`
      );
    });

  const selfLoops = graph.edges
    .filter((edge) => edge.from === edge.to)
    .map((edge) => {
      const p = positions.get(edge.from)!;
      return (
        `<path d="M ${p.x - 10} ${p.y - 16} a 12 10 0 1 1 20 0" fill="none" stroke="#bbb" stroke-dasharray="3 3">` +
        `<title>${edge.labels.join('\n')}</title></path>`
      );
    });

  const nodes = graph.states.map((state, index) => {
    const p = positions.get(index)!;
    const terminal = state.id === 'dropout' || isSink(graph, index);
    const fill = state.id === 'start' ? '#3ca951' : state.id === 'dropout' ? '#9498a0' : terminal ? '#efb118' : '#fff';
    const label = state.id === 'start' || state.id === 'dropout' ? state.id : state.taken.join(',');
    return (
      `<g><rect x="${p.x - 44}" y="${p.y - 15}" width="88" height="30" rx="8" fill="${fill}" fill-opacity="0.9" stroke="#444"/>` +
      `<text x="${p.x}" y="${p.y + 4}" font-size="11" text-anchor="middle">${label}</text></g>`
    );
  });

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    `<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="7" markerHeight="7" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#777"/></marker></defs>` +
    edges.join('') +
    selfLoops.join('') +
    nodes.join('') +
    '</svg>'
  );
}

/** A node is a sink when no advance edge leaves it for another node. */
export function isSink(graph: AggregateGraph, index: number): boolean {
  return !graph.edges.some(
    (edge) =>
      edge.from === index &&
      edge.to !== index &&
      edge.labels.some((label) => label.startsWith('advance')),
  );
}

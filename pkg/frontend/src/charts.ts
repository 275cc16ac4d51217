/** Dependency-free SVG charts for projection results, with CSV/PNG export.
 *
 * The chart builders are pure string -> SVG functions so they can be unit
 * tested without a DOM; the export helpers need a browser.
 */

export interface Series {
  label: string;
  values: number[]; // one per x position
}

const PALETTE = [
  '#4269d0', '#efb118', '#ff725c', '#6cc5b0', '#3ca951',
  '#ff8ab7', '#a463f2', '#97bbf5', '#9c6b4e', '#9498a0',
  '#c84d2c', '#2c6b8f',
];

export const seriesColor = (index: number): string => PALETTE[index % PALETTE.length];

const X_PAD = 46;
const Y_PAD = 22;

function scales(width: number, height: number, xCount: number, yMax: number) {
  const innerW = width - X_PAD - 8;
  const innerH = height - 2 * Y_PAD;
  const x = (i: number) => X_PAD + (xCount <= 1 ? 0 : (i * innerW) / (xCount - 1));
  const y = (v: number) => height - Y_PAD - (yMax <= 0 ? 0 : (v / yMax) * innerH);
  return { x, y };
}

function axes(width: number, height: number, xLabels: (number | string)[], yMax: number): string {
  const { x, y } = scales(width, height, xLabels.length, yMax);
  const parts: string[] = [];
  parts.push(
    `<line x1="${X_PAD}" y1="${height - Y_PAD}" x2="${width - 8}" y2="${height - Y_PAD}" stroke="#888"/>`,
    `<line x1="${X_PAD}" y1="${Y_PAD}" x2="${X_PAD}" y2="${height - Y_PAD}" stroke="#888"/>`,
  );
  xLabels.forEach((label, i) => {
    parts.push(
      `<text x="${x(i).toFixed(1)}" y="${height - 6}" font-size="10" text-anchor="middle" fill="#555">${label}</text>`,
    );
  });
  for (const fraction of [0, 0.5, 1]) {
    const value = yMax * fraction;
    parts.push(
      `<text x="${X_PAD - 4}" y="${(y(value) + 3).toFixed(1)}" font-size="10" text-anchor="end" fill="#555">${value.toFixed(0)}</text>`,
    );
  }
  return parts.join('');
}

/** Stacked area chart; series stack in the order given. */
export function stackedAreaChart(
  xLabels: (number | string)[],
  series: Series[],
  width = 640,
  height = 300,
): string {
  const n = xLabels.length;
  const totals = Array.from({ length: n }, (_, i) =>
    series.reduce((acc, s) => acc + (s.values[i] ?? 0), 0),
  );
  const yMax = Math.max(1e-9, ...totals);
  const { x, y } = scales(width, height, n, yMax);

  const bands: string[] = [];
  const cumulative = new Array(n).fill(0);
  series.forEach((s, index) => {
    const lower = [...cumulative];
    for (let i = 0; i < n; i++) cumulative[i] += s.values[i] ?? 0;
    const upper = [...cumulative];
    const forward = upper.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`);
    const backward = lower
      .map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`)
      .reverse();
    bands.push(
      `<polygon points="${forward.join(' ')} ${backward.join(' ')}" fill="${seriesColor(index)}" fill-opacity="0.85"><title>${s.label}</title></polygon>`,
    );
  });

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    bands.join('') +
    axes(width, height, xLabels, yMax) +
    '</svg>'
  );
}

/** Multi-line chart with point markers. */
export function lineChart(
  xLabels: (number | string)[],
  series: Series[],
  width = 640,
  height = 300,
): string {
  const yMax = Math.max(1e-9, ...series.flatMap((s) => s.values));
  const { x, y } = scales(width, height, xLabels.length, yMax);
  const lines = series.map((s, index) => {
    const points = s.values.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`);
    const markers = s.values
      .map((v, i) => `<circle cx="${x(i).toFixed(1)}" cy="${y(v).toFixed(1)}" r="2.5" fill="${seriesColor(index)}"/>`)
      .join('');
    return (
      `<polyline points="${points.join(' ')}" fill="none" stroke="${seriesColor(index)}" stroke-width="2"><title>${s.label}</title></polyline>` +
      markers
    );
  });
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    lines.join('') +
    axes(width, height, xLabels, yMax) +
    '</svg>'
  );
}

/** CSV for a chart: one row per x value, one column per series. */
export function chartCsv(xName: string, xLabels: (number | string)[], series: Series[]): string {
  const escape = (value: string) => (/[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value);
  const header = [xName, ...series.map((s) => escape(s.label))].join(',');
  const rows = xLabels.map((label, i) =>
    [String(label), ...series.map((s) => String(s.values[i] ?? 0))].join(','),
  );
  return [header, ...rows].join('\n') + '\n';
}

/** Trigger a client-side download (browser only). */
export function downloadBlob(filename: string, mime: string, content: string): void {
  const blob = new Blob([content], { type: mime });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

/** Rasterize an SVG string to PNG and download it (browser only). */
export function downloadSvgAsPng(filename: string, svg: string, width: number, height: number): void {
  const url = URL.createObjectURL(new Blob([svg], { type: 'image/svg+xml' }));
  const image = new Image(width, height);
  image.onload = () => {
    const canvas = document.createElement('canvas');
    canvas.width = width * 2; // 2x for crisp output
    canvas.height = height * 2;
    const context = canvas.getContext('2d')!;
    context.scale(2, 2);
    context.fillStyle = '#ffffff';
    context.fillRect(0, 0, width, height);
    context.drawImage(image, 0, 0);
    URL.revokeObjectURL(url);
    canvas.toBlob((blob) => {
      if (!blob) return;
      const pngUrl = URL.createObjectURL(blob);
      const anchor = document.createElement('a');
      anchor.href = pngUrl;
      anchor.download = filename;
      anchor.click();
      URL.revokeObjectURL(pngUrl);
    }, 'image/png');
  };
  image.src = url;
}

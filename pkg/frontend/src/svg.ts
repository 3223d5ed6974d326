/**
 * Deterministic SVG line charts: fixed layout and palette, no timestamps or
 * generated ids, so identical inputs always produce identical bytes.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
  markers?: boolean;
}

export interface Panel {
  xLabel: string;
  yLabel: string;
  yLog?: boolean;
  series: Series[];
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const W = 720;
const PANEL_H = 300;
const ML = 64, MR = 16, MT = 34, MB = 46;

export function renderFigure(title: string, panels: Panel[]): string {
  const H = PANEL_H * panels.length;
  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ML}" y="18" font-size="13" font-weight="600" fill="#222">${esc(title)}</text>\n`;
  panels.forEach((panel, i) => {
    s += panelSvg(panel, i * PANEL_H);
  });
  s += "</svg>\n";
  return s;
}

function panelSvg(panel: Panel, top: number): string {
  const pw = W - ML - MR;
  const ph = PANEL_H - MT - MB;
  const xs = panel.series.flatMap((s) => s.x);
  const ys = panel.series.flatMap((s) => s.y);
  if (xs.length === 0) {
    // Every point was dropped (e.g. an all-zero metric on a log axis):
    // annotate instead of failing so sibling panels still render.
    return (
      `<rect x="${ML}" y="${top + MT}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="0.8"/>\n` +
      `<text x="${ML + pw / 2}" y="${top + MT + ph / 2}" font-size="11" fill="#888" text-anchor="middle">` +
      `${esc(panel.yLabel)}: no plottable points (all dropped on log axis)</text>\n`
    );
  }
  const [x0, x1] = padRange(Math.min(...xs), Math.max(...xs), false);
  const yRaw = panel.yLog ? ys.map(Math.log10) : ys;
  const [y0, y1] = padRange(Math.min(...yRaw), Math.max(...yRaw), !!panel.yLog);

  const xOf = (v: number) => ML + ((v - x0) / (x1 - x0 || 1)) * pw;
  const yOf = (v: number) => {
    const t = panel.yLog ? Math.log10(v) : v;
    return top + MT + ph - ((t - y0) / (y1 - y0 || 1)) * ph;
  };

  let s = "";
  // frame and grid
  const xTicks = niceTicks(x0, x1, 7);
  const yTicks = panel.yLog ? logTicks(y0, y1) : niceTicks(y0, y1, 6);
  for (const v of yTicks) {
    const y = top + MT + ph - ((panel.yLog ? Math.log10(v) : v) - y0) / (y1 - y0 || 1) * ph;
    s += `<line x1="${ML}" y1="${r(y)}" x2="${ML + pw}" y2="${r(y)}" stroke="#e5e5e5" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${r(y + 3)}" font-size="10" fill="#444" text-anchor="end">${fmtTick(v, !!panel.yLog)}</text>\n`;
  }
  for (const v of xTicks) {
    const x = xOf(v);
    s += `<line x1="${r(x)}" y1="${top + MT}" x2="${r(x)}" y2="${top + MT + ph}" stroke="#f0f0f0" stroke-width="0.6"/>\n`;
    s += `<text x="${r(x)}" y="${top + MT + ph + 16}" font-size="10" fill="#444" text-anchor="middle">${fmtTick(v, false)}</text>\n`;
  }
  s += `<rect x="${ML}" y="${top + MT}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + pw / 2}" y="${top + PANEL_H - 12}" font-size="11" fill="#222" text-anchor="middle">${esc(panel.xLabel)}</text>\n`;
  s += `<text x="16" y="${top + MT + ph / 2}" font-size="11" fill="#222" text-anchor="middle" transform="rotate(-90 16 ${top + MT + ph / 2})">${esc(panel.yLabel)}</text>\n`;

  // series
  for (const sr of panel.series) {
    const pts = sr.x.map((xv, i) => `${r(xOf(xv))},${r(yOf(sr.y[i]))}`);
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    s += `<polyline points="${pts.join(" ")}" fill="none" stroke="${sr.color}" stroke-width="1.6"${dash}/>\n`;
    if (sr.markers ?? true) {
      for (const p of pts) {
        const [px, py] = p.split(",");
        s += `<circle cx="${px}" cy="${py}" r="2.2" fill="${sr.color}"/>\n`;
      }
    }
  }

  // legend
  let ly = top + MT + 12;
  for (const sr of panel.series) {
    const lx = ML + pw - 170;
    s += `<line x1="${lx}" y1="${ly - 3}" x2="${lx + 22}" y2="${ly - 3}" stroke="${sr.color}" stroke-width="1.6"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""}/>\n`;
    s += `<text x="${lx + 27}" y="${ly}" font-size="10" fill="#222">${esc(sr.label)}</text>\n`;
    ly += 14;
  }
  return s;
}

function padRange(lo: number, hi: number, log: boolean): [number, number] {
  if (lo === hi) {
    return log ? [lo - 0.5, hi + 0.5] : [lo - 1, hi + 1];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

/** Round numbers covering [lo, hi] at a 1/2/5 step, at most `n` of them. */
export function niceTicks(lo: number, hi: number, n: number): number[] {
  const span = hi - lo || 1;
  const step0 = span / Math.max(n - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= step0) {
      step = mag * m;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

/** Powers of ten spanning a log10 range. */
function logTicks(log0: number, log1: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(log0); e <= Math.floor(log1) + 1e-9; e++) {
    out.push(Math.pow(10, e));
  }
  if (out.length === 0) {
    out.push(Math.pow(10, Math.round((log0 + log1) / 2)));
  }
  return out;
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    if (e < -2 || e > 3) return `1e${e}`;
    return String(v);
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(0).replace("+", "");
  return String(Math.round(v * 1000) / 1000);
}

function r(v: number): string {
  return v.toFixed(1);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

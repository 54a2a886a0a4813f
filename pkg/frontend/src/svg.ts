/** Minimal self-contained SVG line/scatter plotting (no runtime deps). */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  /** draw a connecting line (default true) */
  line?: boolean;
  /** draw square markers at each point (default false) */
  markers?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
}

const MARGIN = { top: 44, right: 24, bottom: 52, left: 72 };

/** Tick positions covering [min, max] at a 1/2/5 step. */
export function niceTicks(min: number, max: number, target = 6): number[] {
  if (!(max > min)) {
    const pad = Math.abs(min) > 0 ? Math.abs(min) * 0.1 : 1.0;
    return niceTicks(min - pad, max + pad, target);
  }
  const rawStep = (max - min) / Math.max(target - 1, 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[3];
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + 1e-12 * step; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) return value.toExponential(1);
  return String(Number(value.toPrecision(6)));
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render the spec and series to SVG text. */
export function renderPlot(spec: PlotSpec, series: Series[]): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  if (xs.length === 0) throw new Error("nothing to plot");
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  const yPad = (yMax - yMin || 1) * 0.06;
  yMin -= yPad;
  yMax += yPad;
  if (xMax === xMin) {
    xMin -= 1;
    xMax += 1;
  }

  const px = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (y - yMin) / (yMax - yMin)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="15">` +
      `${escapeXml(spec.title)}</text>`,
  );

  for (const tick of niceTicks(xMin, xMax)) {
    const x = px(tick);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" ` +
        `y2="${MARGIN.top + plotH}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${x.toFixed(2)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11">${formatTick(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(yMin, yMax)) {
    const y = py(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y.toFixed(2)}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${MARGIN.left - 8}" y="${(y + 4).toFixed(2)}" text-anchor="end" ` +
        `font-size="11">${formatTick(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-size="13">${escapeXml(spec.xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  for (const s of series) {
    if (s.x.length !== s.y.length) {
      throw new Error(`series '${s.label}': x and y lengths differ`);
    }
    if (s.line !== false) {
      const points = s.x
        .map((x, i) => `${px(x).toFixed(2)},${py(s.y[i]).toFixed(2)}`)
        .join(" ");
      parts.push(
        `<polyline points="${points}" fill="none" stroke="${s.color}" stroke-width="1.6"/>`,
      );
    }
    if (s.markers) {
      for (let i = 0; i < s.x.length; i++) {
        parts.push(
          `<rect x="${(px(s.x[i]) - 3).toFixed(2)}" y="${(py(s.y[i]) - 3).toFixed(2)}" ` +
            `width="6" height="6" fill="none" stroke="${s.color}" stroke-width="1.4"/>`,
        );
      }
    }
  }

  series.forEach((s, i) => {
    const y = MARGIN.top + 14 + 16 * i;
    const x = MARGIN.left + plotW - 170;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${x + 28}" y="${y}" font-size="11">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

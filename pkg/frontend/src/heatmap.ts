// Heatmap-colored table rendering. Colors come solely from the server's
// palette and level indices; on any shape disagreement we fall back to a
// plain table with a visible warning instead of guessing.

import type { HeatmapPayload } from "./types.js";

export interface CellHighlight {
  row: number;
  col: number;
}

function shapeMatches(header: string[], rows: string[][], heatmap: HeatmapPayload): boolean {
  if (heatmap.col_levels.length !== header.length) return false;
  if (heatmap.row_levels.length !== rows.length) return false;
  if (heatmap.cell_levels.length !== rows.length) return false;
  if (heatmap.palette.length === 0) return false;
  return heatmap.cell_levels.every(
    (levels, i) => levels.length === (rows[i]?.length ?? -1),
  );
}

function paletteColor(palette: string[], level: number): string {
  const index = Math.min(Math.max(level, 0), palette.length - 1);
  return palette[index];
}

function buildTable(
  header: string[],
  rows: string[][],
  paint?: {
    heatmap: HeatmapPayload;
    topCell?: CellHighlight;
  },
): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "qa-table";

  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  // leading gutter column carries the per-row tint
  headRow.appendChild(document.createElement("th"));
  header.forEach((name, j) => {
    const th = document.createElement("th");
    th.textContent = name;
    if (paint) {
      th.style.backgroundColor = paletteColor(paint.heatmap.palette, paint.heatmap.col_levels[j]);
      th.dataset.level = String(paint.heatmap.col_levels[j]);
    }
    headRow.appendChild(th);
  });
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = document.createElement("tbody");
  rows.forEach((row, i) => {
    const tr = document.createElement("tr");
    const gutter = document.createElement("th");
    gutter.className = "row-gutter";
    gutter.textContent = String(i + 1);
    if (paint) {
      gutter.style.backgroundColor = paletteColor(paint.heatmap.palette, paint.heatmap.row_levels[i]);
      gutter.dataset.level = String(paint.heatmap.row_levels[i]);
    }
    tr.appendChild(gutter);
    row.forEach((value, j) => {
      const td = document.createElement("td");
      td.textContent = value;
      td.dataset.row = String(i);
      td.dataset.col = String(j);
      if (paint) {
        const level = paint.heatmap.cell_levels[i][j];
        td.style.backgroundColor = paletteColor(paint.heatmap.palette, level);
        td.dataset.level = String(level);
        if (paint.topCell && paint.topCell.row === i && paint.topCell.col === j) {
          td.classList.add("top-cell");
        }
      }
      tr.appendChild(td);
    });
    tbody.appendChild(tr);
  });
  table.appendChild(tbody);
  return table;
}

/** Render a table with heatmap coloring; falls back to a plain table
 * plus a warning node when the level shapes do not match. */
export function renderHeatmap(
  header: string[],
  rows: string[][],
  heatmap: HeatmapPayload,
  topCell?: CellHighlight,
): HTMLElement {
  const container = document.createElement("div");
  container.className = "heatmap-container";
  if (!shapeMatches(header, rows, heatmap)) {
    const warning = document.createElement("p");
    warning.className = "heatmap-warning";
    warning.setAttribute("role", "alert");
    warning.textContent = "Relevance overlay unavailable: level shape mismatch.";
    container.appendChild(warning);
    container.appendChild(buildTable(header, rows));
    return container;
  }
  container.appendChild(buildTable(header, rows, { heatmap, topCell }));
  return container;
}

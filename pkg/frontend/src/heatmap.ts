import { bandColor } from "./bands";
import { createElement, escapeHtml, on } from "./dom";
import type { RiskEntry } from "./types";

export interface HeatMapCell {
  impact: number;
  likelihood: number;
  score: number | null;
  band: string | null;
  entryIds: string[];
}

export interface HeatMapProps {
  entries: RiskEntry[];
  onSelect?: (cell: HeatMapCell) => void;
}

const cellKey = (impact: number, likelihood: number) => `${impact}:${likelihood}`;

/**
 * Group entries into the 25 (impact, likelihood) cells. Score and band are
 * copied from the API's risk documents; an empty cell has neither.
 */
export function groupByCell(entries: RiskEntry[]): Map<string, HeatMapCell> {
  const cells = new Map<string, HeatMapCell>();
  for (let impact = 1; impact <= 5; impact++) {
    for (let likelihood = 1; likelihood <= 5; likelihood++) {
      cells.set(cellKey(impact, likelihood), {
        impact,
        likelihood,
        score: null,
        band: null,
        entryIds: [],
      });
    }
  }
  for (const entry of entries) {
    const cell = cells.get(cellKey(entry.impact, entry.likelihood));
    if (!cell) continue;
    cell.entryIds.push(entry.id);
    cell.score = entry.baseScore;
    cell.band = entry.baseRating.band;
  }
  return cells;
}

function cellHtml(cell: HeatMapCell): string {
  if (!cell.entryIds.length) return "";
  const count = cell.entryIds.length > 1 ? `<span class="count">${cell.entryIds.length} entries</span>` : "";
  return `<span class="score">${escapeHtml(cell.score)}</span>${count}`;
}

/**
 * 5x5 risk heat map: impact rows top-down from 5, likelihood columns left
 * to right from 1, so (5,5) lands top-right. Clicking a cell opens its
 * entry list in the side panel.
 */
export function renderHeatMap(props: HeatMapProps): HTMLElement {
  const root = createElement("div", "heatmap-layout");
  const cells = groupByCell(props.entries);

  const grid = createElement("div", "heatmap-grid");
  let html = "";
  for (let impact = 5; impact >= 1; impact--) {
    html += `<div class="axis">I${impact}</div>`;
    for (let likelihood = 1; likelihood <= 5; likelihood++) {
      const cell = cells.get(cellKey(impact, likelihood))!;
      const occupied = cell.entryIds.length > 0;
      html += `
        <div class="hm-cell${occupied ? " occupied" : ""}"
             data-impact="${impact}" data-likelihood="${likelihood}"
             ${cell.band ? `data-band="${escapeHtml(cell.band)}"` : ""}>
          ${cellHtml(cell)}
        </div>`;
    }
  }
  html += `<div class="axis"></div>`;
  for (let likelihood = 1; likelihood <= 5; likelihood++) {
    html += `<div class="axis">L${likelihood}</div>`;
  }
  grid.innerHTML = html;

  grid.querySelectorAll<HTMLElement>(".hm-cell[data-band]").forEach((el) => {
    el.style.background = bandColor(el.dataset.band!);
  });

  const detail = createElement("div", "hm-detail", `<h3>Cell detail</h3><p class="empty">Click a cell.</p>`);
  const byId = new Map(props.entries.map((e) => [e.id, e]));

  grid.querySelectorAll<HTMLElement>(".hm-cell").forEach((el) => {
    on(el, "click", () => {
      const impact = Number(el.dataset.impact);
      const likelihood = Number(el.dataset.likelihood);
      const cell = cells.get(cellKey(impact, likelihood))!;
      const rows = cell.entryIds
        .map((id) => {
          const entry = byId.get(id)!;
          return `<li><b>${escapeHtml(id)}</b> asset ${escapeHtml(entry.assetId)},
            score ${escapeHtml(entry.baseScore)} (${escapeHtml(entry.baseRating.band)})</li>`;
        })
        .join("");
      detail.innerHTML = `
        <h3>Impact ${impact} / Likelihood ${likelihood}</h3>
        ${rows ? `<ul>${rows}</ul>` : `<p class="empty">No entries in this cell.</p>`}
      `;
      props.onSelect?.(cell);
    });
  });

  root.appendChild(grid);
  root.appendChild(detail);
  return root;
}

export default renderHeatMap;

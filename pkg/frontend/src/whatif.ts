import type { ApiClient } from "./api";
import { ApiError } from "./api";
import { bandColor } from "./bands";
import { createElement, escapeHtml, on } from "./dom";
import type { Projection, RiskEntry } from "./types";

export interface WhatIfProps {
  api: ApiClient;
  entries: RiskEntry[];
}

function projectionHtml(p: Projection): string {
  return `
    <div class="proj-score" data-field="score">${escapeHtml(p.score)}</div>
    <div>
      <span class="band-chip" data-field="band">${escapeHtml(p.rating.band)}</span>
      <div class="proj-basis">${escapeHtml(p.rating.decisionBasis)}, ${escapeHtml(
        p.rating.timelineMonths
      )} month timeline</div>
    </div>
    <div class="proj-health">
      Portfolio if applied:
      <b data-field="health">${escapeHtml(p.portfolioHealth.percent)}% ${escapeHtml(
        p.portfolioHealth.band
      )}</b>
    </div>
  `;
}

/**
 * What-if residual panel. Slider changes ask the API for a projection and
 * print exactly what comes back; submitting runs the owner approval flow
 * with the same coordinates. Nothing is persisted until then.
 */
export function renderWhatIf(props: WhatIfProps): HTMLElement {
  const root = createElement("div", "whatif-panel");

  if (!props.entries.length) {
    root.innerHTML = `<p class="empty">No risk entries yet; the what-if panel needs at least one.</p>`;
    return root;
  }

  root.innerHTML = `
    <div class="row">
      <label>Risk entry</label>
      <select data-field="risk">
        ${props.entries
          .map(
            (e) =>
              `<option value="${escapeHtml(e.id)}">${escapeHtml(e.id)} (base ${escapeHtml(
                e.baseScore
              )})</option>`
          )
          .join("")}
      </select>
    </div>
    <div class="row">
      <label>Impact</label>
      <input type="range" min="1" max="5" step="1" value="1" data-field="impact">
      <span data-field="impact-value">1</span>
    </div>
    <div class="row">
      <label>Likelihood</label>
      <input type="range" min="1" max="5" step="1" value="1" data-field="likelihood">
      <span data-field="likelihood-value">1</span>
    </div>
    <div class="projection" data-field="projection"><span class="empty">Loading projection...</span></div>
    <div class="row">
      <label>Medium</label>
      <select data-field="medium">
        <option value="Electronic">Electronic</option>
        <option value="HardCopy">HardCopy</option>
      </select>
      <button class="action" data-field="approve">Submit owner approval</button>
    </div>
    <div class="inline-error" data-field="error"></div>
  `;

  const riskSelect = root.querySelector('[data-field="risk"]') as HTMLSelectElement;
  const impactSlider = root.querySelector('[data-field="impact"]') as HTMLInputElement;
  const likelihoodSlider = root.querySelector('[data-field="likelihood"]') as HTMLInputElement;
  const impactValue = root.querySelector('[data-field="impact-value"]') as HTMLElement;
  const likelihoodValue = root.querySelector('[data-field="likelihood-value"]') as HTMLElement;
  const projectionBox = root.querySelector('[data-field="projection"]') as HTMLElement;
  const mediumSelect = root.querySelector('[data-field="medium"]') as HTMLSelectElement;
  const errorBox = root.querySelector('[data-field="error"]') as HTMLElement;

  const byId = new Map(props.entries.map((e) => [e.id, e]));
  let ticket = 0;

  const refresh = async () => {
    errorBox.textContent = "";
    impactValue.textContent = impactSlider.value;
    likelihoodValue.textContent = likelihoodSlider.value;
    const mine = ++ticket;
    try {
      const projection = await props.api.projection(
        riskSelect.value,
        Number(impactSlider.value),
        Number(likelihoodSlider.value)
      );
      if (mine !== ticket) return;
      projectionBox.innerHTML = projectionHtml(projection);
      const chip = projectionBox.querySelector('[data-field="band"]') as HTMLElement;
      chip.style.background = bandColor(projection.rating.band);
    } catch (err) {
      if (mine !== ticket) return;
      projectionBox.innerHTML = `<span class="empty">No projection.</span>`;
      errorBox.textContent = err instanceof ApiError ? err.message : String(err);
    }
  };

  const resetToEntry = () => {
    const entry = byId.get(riskSelect.value);
    if (entry) {
      impactSlider.value = String(entry.impact);
      likelihoodSlider.value = String(entry.likelihood);
    }
    void refresh();
  };

  on(riskSelect, "change", resetToEntry);
  on(impactSlider, "input", () => void refresh());
  on(likelihoodSlider, "input", () => void refresh());

  on(root.querySelector('[data-field="approve"]'), "click", async () => {
    errorBox.textContent = "";
    try {
      await props.api.approveResidual(
        riskSelect.value,
        Number(impactSlider.value),
        Number(likelihoodSlider.value),
        mediumSelect.value
      );
      errorBox.textContent = "Residual approval recorded.";
    } catch (err) {
      errorBox.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });

  resetToEntry();
  return root;
}

export default renderWhatIf;

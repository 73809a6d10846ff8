import { ApiClient } from "./api";
import { loadActor, renderActorPicker } from "./actor";
import { renderCaBoard } from "./caboard";
import { createElement, escapeHtml, on } from "./dom";
import { renderHeatMap } from "./heatmap";
import { renderWhatIf } from "./whatif";

type ViewName = "heatmap" | "whatif" | "caboard";

const VIEWS: { name: ViewName; label: string }[] = [
  { name: "heatmap", label: "Heat map" },
  { name: "whatif", label: "What-if" },
  { name: "caboard", label: "Corrective actions" },
];

function todayIso(): string {
  return new Date().toISOString().slice(0, 10);
}

function retryBanner(message: string, retry: () => void): HTMLElement {
  const banner = createElement(
    "div",
    "banner-error",
    `<span>${escapeHtml(message)}</span><button class="action" data-action="retry">Retry</button>`
  );
  on(banner.querySelector('[data-action="retry"]'), "click", retry);
  return banner;
}

export function initDashboard(root: HTMLElement): void {
  const actor = loadActor();
  const api = new ApiClient(actor);

  root.innerHTML = `
    <header class="topbar">
      <h1>ISMS Dashboard</h1>
      <span class="health-strip" data-field="health"></span>
      <span data-field="picker"></span>
    </header>
    <nav class="tabs" data-field="tabs"></nav>
    <main>
      <section class="view" data-view="heatmap"></section>
      <section class="view" data-view="whatif"></section>
      <section class="view" data-view="caboard"></section>
    </main>
  `;

  const healthStrip = root.querySelector('[data-field="health"]') as HTMLElement;
  const tabs = root.querySelector('[data-field="tabs"]') as HTMLElement;
  const sections = new Map<ViewName, HTMLElement>(
    VIEWS.map(({ name }) => [name, root.querySelector(`[data-view="${name}"]`) as HTMLElement])
  );

  const refreshHealth = async () => {
    try {
      const health = await api.portfolioHealth();
      healthStrip.innerHTML = `Portfolio: <b>${escapeHtml(health.percent)}% ${escapeHtml(health.band)}</b>`;
    } catch {
      healthStrip.textContent = "Portfolio health unavailable";
    }
  };

  const loaders: Record<ViewName, (target: HTMLElement) => Promise<void>> = {
    async heatmap(target) {
      const entries = await api.listRisks();
      target.replaceChildren(renderHeatMap({ entries }));
    },
    async whatif(target) {
      const entries = await api.listRisks();
      target.replaceChildren(renderWhatIf({ api, entries }));
    },
    async caboard(target) {
      const [records, report] = await Promise.all([
        api.listNonconformities(),
        api.overdueReport(todayIso()),
      ]);
      target.replaceChildren(
        renderCaBoard({
          api,
          records,
          report,
          onMutated: () => void show(current),
        })
      );
    },
  };

  let current: ViewName = "heatmap";

  const show = async (name: ViewName) => {
    current = name;
    tabs.querySelectorAll("button").forEach((b) => {
      b.classList.toggle("active", b.dataset.view === name);
    });
    for (const [viewName, section] of sections) {
      section.classList.toggle("active", viewName === name);
    }
    const target = sections.get(name)!;
    try {
      await loaders[name](target);
    } catch (err) {
      target.replaceChildren(
        retryBanner(`Could not load this view: ${String(err)}`, () => void show(name))
      );
    }
    void refreshHealth();
  };

  for (const { name, label } of VIEWS) {
    const button = createElement("button", "", label);
    button.dataset.view = name;
    on(button, "click", () => void show(name));
    tabs.appendChild(button);
  }

  const picker = renderActorPicker(actor, () => void show(current));
  (root.querySelector('[data-field="picker"]') as HTMLElement).replaceWith(picker);

  void show("heatmap");
}

const appRoot = document.getElementById("app");
if (appRoot) initDashboard(appRoot);

import { afterEach, describe, expect, it, vi } from "vitest";

import { BAND_COLORS } from "../src/bands";
import { groupByCell, renderHeatMap } from "../src/heatmap";
import { initDashboard } from "../src/main";
import { flushAsync, interceptFetch } from "./helpers";
import { rating, riskEntry } from "./fixtures";

const ENTRIES = [
  riskEntry("r-55", 5, 5, 100, rating("Severe", "ImmediateAction", 1)),
  riskEntry("r-11", 1, 1, 4, rating("Negligible", "RiskAppetite", 12)),
  riskEntry("r-34", 3, 4, 48, rating("Moderate", "MgmtNotify", 3)),
];

function cellAt(root: HTMLElement, impact: number, likelihood: number): HTMLElement {
  const cell = root.querySelector<HTMLElement>(
    `.hm-cell[data-impact="${impact}"][data-likelihood="${likelihood}"]`
  );
  expect(cell).not.toBeNull();
  return cell!;
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

describe("heat map placement from API fixtures", () => {
  it("renders (5,5), (1,1) and (3,4) in their cells with the API's scores and band colors", async () => {
    interceptFetch({
      "GET /api/risks": { body: ENTRIES },
      "GET /api/reports/portfolio-health": { body: { band: "Fair", percent: 16.0 } },
    });

    const root = document.createElement("div");
    document.body.appendChild(root);
    initDashboard(root);
    await flushAsync();

    const grid = root.querySelector(".heatmap-grid") as HTMLElement;

    const severe = cellAt(grid, 5, 5);
    expect(severe.querySelector(".score")?.textContent).toBe("100");
    expect(severe.dataset.band).toBe("Severe");
    expect(severe.style.background).toBe(BAND_COLORS.Severe);
    // top-right: first grid row is impact 5 (axis label + cells L1..L5)
    expect(grid.children[5]).toBe(severe);

    const negligible = cellAt(grid, 1, 1);
    expect(negligible.querySelector(".score")?.textContent).toBe("4");
    expect(negligible.style.background).toBe(BAND_COLORS.Negligible);

    const moderate = cellAt(grid, 3, 4);
    expect(moderate.querySelector(".score")?.textContent).toBe("48");
    expect(moderate.dataset.band).toBe("Moderate");
    expect(moderate.style.background).toBe(BAND_COLORS.Moderate);

    // untouched cell stays neutral
    const empty = cellAt(grid, 2, 5);
    expect(empty.dataset.band).toBeUndefined();
    expect(empty.textContent?.trim()).toBe("");
  });

  it("echoes whatever score the API returns, even an impossible one", () => {
    // 7777 is not a value f(I,L) can produce; it can only appear on screen
    // if the cell is a passthrough of the API document.
    const poisoned = [riskEntry("r-x", 2, 3, 7777, rating("Moderate", "MgmtNotify", 3))];
    const view = renderHeatMap({ entries: poisoned });
    const cell = cellAt(view, 2, 3);
    expect(cell.querySelector(".score")?.textContent).toBe("7777");
  });

  it("badges a cell holding two entries and lists both on click", () => {
    const pair = [
      riskEntry("r-a", 4, 4, 64, rating("Significant", "MgmtTrigger", 1)),
      riskEntry("r-b", 4, 4, 64, rating("Significant", "MgmtTrigger", 1)),
    ];
    const view = renderHeatMap({ entries: pair });
    document.body.appendChild(view);

    const cell = cellAt(view, 4, 4);
    expect(cell.querySelector(".count")?.textContent).toBe("2 entries");

    cell.click();
    const detail = view.querySelector(".hm-detail") as HTMLElement;
    expect(detail.textContent).toContain("r-a");
    expect(detail.textContent).toContain("r-b");
  });

  it("keeps an empty register as a bare grid with axis labels", () => {
    const view = renderHeatMap({ entries: [] });
    expect(view.querySelectorAll(".hm-cell").length).toBe(25);
    expect(view.querySelectorAll(".hm-cell[data-band]").length).toBe(0);
    expect(view.textContent).toContain("I5");
    expect(view.textContent).toContain("L1");
  });

  it("places every entry in exactly one cell", () => {
    const cells = groupByCell(ENTRIES);
    const placed = [...cells.values()].flatMap((c) => c.entryIds);
    expect(placed.sort()).toEqual(["r-11", "r-34", "r-55"]);
    expect(cells.get("3:4")?.band).toBe("Moderate");
    expect(cells.get("3:4")?.score).toBe(48);
  });
});

import type { ApiClient } from "./api";
import { ApiError } from "./api";
import { createElement, escapeHtml, on } from "./dom";
import type { Nonconformity, OverdueReport } from "./types";

export interface CaBoardProps {
  api: ApiClient;
  records: Nonconformity[];
  report: OverdueReport;
  onMutated: () => void;
}

export const STEP_TITLES = [
  "0 Reported",
  "1 Containment",
  "2 Root cause",
  "3 Action plan",
  "4 Implement",
  "5 Risk review",
  "6 Verify",
  "7 Closure",
];

function parseDay(value: string): number {
  const [y, m, d] = value.split("-").map(Number);
  return Date.UTC(y, m - 1, d);
}

export function effectiveDeadline(record: Nonconformity): string {
  if (record.extensions.length) {
    return record.extensions[record.extensions.length - 1].newDeadline;
  }
  return record.deadline;
}

/** Whole days from today until the record's effective deadline; negative = past. */
export function daysRemaining(record: Nonconformity, today: string): number {
  return Math.round((parseDay(effectiveDeadline(record)) - parseDay(today)) / 86400000);
}

function cardHtml(record: Nonconformity, days: number): string {
  const dispensed = record.status === "Dispensed";
  const closed = record.status === "Closed";
  const daysLabel = dispensed
    ? "dispensed"
    : closed
      ? "closed"
      : `<span class="days">${days}d</span>`;
  const buttons =
    dispensed || closed
      ? ""
      : `
    <div class="buttons">
      <button class="action" data-action="advance">Advance</button>
      <button class="action" data-action="extend">Extend</button>
      <button class="action" data-action="dispense">Dispense</button>
    </div>`;
  return `
    <div><b>${escapeHtml(record.id)}</b> ${daysLabel}</div>
    <div>${escapeHtml(record.description)}</div>
    <div class="due">due ${escapeHtml(effectiveDeadline(record))}</div>
    ${buttons}
    <div class="card-form-slot"></div>
    <div class="card-error" data-field="error"></div>
  `;
}

type FormField = { name: string; label: string; type?: string };

function openForm(
  slot: HTMLElement,
  fields: FormField[],
  submit: (values: Record<string, string>) => Promise<void>
): void {
  const form = createElement("div", "card-form");
  form.innerHTML =
    fields
      .map(
        (f) =>
          `<input type="${f.type ?? "text"}" placeholder="${escapeHtml(f.label)}" data-name="${f.name}">`
      )
      .join("") + `<button class="action" data-action="confirm">Confirm</button>`;
  slot.replaceChildren(form);

  on(form.querySelector('[data-action="confirm"]'), "click", async () => {
    const values: Record<string, string> = {};
    form.querySelectorAll<HTMLInputElement>("input[data-name]").forEach((input) => {
      values[input.dataset.name!] = input.value.trim();
    });
    await submit(values);
  });
}

function renderCard(record: Nonconformity, props: CaBoardProps, overdue: boolean): HTMLElement {
  const days = daysRemaining(record, props.report.today);
  const classes = ["ca-card"];
  if (record.status === "Dispensed") classes.push("dispensed");
  if (record.status === "Closed") classes.push("closed");
  if (overdue) classes.push("overdue");

  const card = createElement("div", classes.join(" "), cardHtml(record, days));
  card.dataset.recordId = record.id;

  const slot = card.querySelector(".card-form-slot") as HTMLElement;
  const errorBox = card.querySelector('[data-field="error"]') as HTMLElement;

  const runAction = async (action: () => Promise<unknown>) => {
    errorBox.textContent = "";
    try {
      await action();
      props.onMutated();
    } catch (err) {
      // 403/422 bodies from the engine are shown as written
      errorBox.textContent = err instanceof ApiError ? err.message : String(err);
    }
  };

  on(card.querySelector('[data-action="advance"]'), "click", () => {
    const needsRef = record.currentStep + 1 === 5;
    const fields: FormField[] = [{ name: "evidence", label: "Evidence" }];
    if (needsRef) fields.push({ name: "riskReviewRef", label: "Risk entry id" });
    openForm(slot, fields, (values) =>
      runAction(() =>
        props.api.advanceNc(record.id, values.evidence, values.riskReviewRef || undefined)
      )
    );
  });

  on(card.querySelector('[data-action="extend"]'), "click", () => {
    openForm(
      slot,
      [
        { name: "justification", label: "Justification" },
        { name: "newDeadline", label: "New deadline", type: "date" },
      ],
      (values) => runAction(() => props.api.extendNc(record.id, values.justification, values.newDeadline))
    );
  });

  on(card.querySelector('[data-action="dispense"]'), "click", () => {
    openForm(slot, [{ name: "reason", label: "Reason" }], (values) =>
      runAction(() => props.api.dispenseNc(record.id, values.reason))
    );
  });

  return card;
}

/**
 * Corrective-action deadline board: one column per workflow step. Which
 * records count as overdue or escalated comes from the server's deadline
 * report for the given day, not from a local re-check.
 */
export function renderCaBoard(props: CaBoardProps): HTMLElement {
  const root = createElement("div", "ca-board");

  const overdueIds = new Set(
    props.report.deadlines.filter((row) => row.state === "Overdue").map((row) => row.recordId)
  );

  const columns = createElement("div", "ca-columns");
  const lists: HTMLElement[] = STEP_TITLES.map((title, step) => {
    const col = createElement("div", "ca-col", `<h4>${title}</h4>`);
    col.dataset.step = String(step);
    columns.appendChild(col);
    return col;
  });

  for (const record of props.records) {
    const column = lists[record.currentStep] ?? lists[lists.length - 1];
    column.appendChild(renderCard(record, props, overdueIds.has(record.id)));
  }

  const escalation = createElement("div", "escalation-panel");
  const items = props.report.escalations
    .map((id) => `<li data-record-id="${escapeHtml(id)}">${escapeHtml(id)}</li>`)
    .join("");
  escalation.innerHTML = `
    <h3>Escalations (${props.report.today})</h3>
    ${items ? `<ul>${items}</ul>` : `<p class="empty">Nothing overdue without an extension or dispensation.</p>`}
  `;

  root.appendChild(columns);
  root.appendChild(escalation);
  return root;
}

export default renderCaBoard;

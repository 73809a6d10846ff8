import type { Actor } from "./api";
import { createElement, escapeHtml, on } from "./dom";

const STORAGE_KEY = "isms-actor";

export const ROLES = [
  "Assessor",
  "RiskOwner",
  "InfoSecOfficial",
  "HeadOfIT",
  "ITOperations",
  "ITAudit",
  "CISO",
  "TopManagement",
  "DBA",
  "CorrectiveActionsAdmin",
];

export function loadActor(): Actor {
  try {
    const raw = sessionStorage.getItem(STORAGE_KEY);
    if (raw) {
      const parsed = JSON.parse(raw);
      if (parsed && typeof parsed.id === "string" && typeof parsed.role === "string") {
        return { id: parsed.id, role: parsed.role };
      }
    }
  } catch {
    // fall through to the default
  }
  return { id: "viewer", role: "Assessor" };
}

function saveActor(actor: Actor): void {
  try {
    sessionStorage.setItem(STORAGE_KEY, JSON.stringify(actor));
  } catch {
    // session storage unavailable; the picker still works for this page
  }
}

/**
 * Session actor picker. The chosen identity rides along as headers on
 * every request, mirroring how the API trusts its callers.
 */
export function renderActorPicker(actor: Actor, onChange: () => void): HTMLElement {
  const root = createElement("div", "actor-picker");
  root.innerHTML = `
    <label>Acting as</label>
    <input type="text" data-field="actor-id" value="${escapeHtml(actor.id)}" size="10" title="Actor id">
    <select data-field="actor-role" title="Actor role">
      ${ROLES.map(
        (r) => `<option value="${r}"${r === actor.role ? " selected" : ""}>${r}</option>`
      ).join("")}
    </select>
  `;

  const idInput = root.querySelector('[data-field="actor-id"]') as HTMLInputElement;
  const roleSelect = root.querySelector('[data-field="actor-role"]') as HTMLSelectElement;

  const apply = () => {
    actor.id = idInput.value.trim() || "viewer";
    actor.role = roleSelect.value;
    saveActor(actor);
    onChange();
  };

  on(idInput, "change", apply);
  on(roleSelect, "change", apply);
  return root;
}

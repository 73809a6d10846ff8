/**
 * Create an element with a class and optional inner HTML.
 */
export function createElement<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  html?: string
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  if (className) el.className = className;
  if (html !== undefined) el.innerHTML = html;
  return el;
}

/**
 * addEventListener with a null-tolerant target, so querySelector results
 * can be passed straight in.
 */
export function on(
  el: EventTarget | null,
  type: string,
  fn: EventListenerOrEventListenerObject
): void {
  if (!el) return;
  el.addEventListener(type, fn);
}

export function escapeHtml(value: unknown): string {
  return String(value ?? "")
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#039;");
}

/**
 * Cell and chip colors keyed by the band label the API returns. Presentation
 * only: the engine decides which band a score falls in, never this file.
 */
export const BAND_COLORS: Record<string, string> = {
  Negligible: "var(--band-negligible)",
  Minor: "var(--band-minor)",
  Moderate: "var(--band-moderate)",
  Significant: "var(--band-significant)",
  Severe: "var(--band-severe)",
};

export function bandColor(band: string): string {
  return BAND_COLORS[band] ?? "var(--band-none)";
}

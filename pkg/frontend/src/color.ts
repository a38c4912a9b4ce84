/**
 * Shared color encodings: z-scores map to a diverging ramp that is nearly
 * white at 0, cools to blue below the baseline, and warms to orange above.
 */

import { interpolateRgb, piecewise, scaleDiverging } from "d3";

const Z_RAMP = piecewise(interpolateRgb, ["#2166ac", "#f7f7f7", "#e08214"]);
const Z_DOMAIN = 3; // hue saturates beyond |z| = 3; scores are clamped far above

const zScale = scaleDiverging<string>(Z_RAMP)
  .domain([-Z_DOMAIN, 0, Z_DOMAIN])
  .clamp(true);

export function zColor(z: number): string {
  return zScale(z);
}

export const STATUS_COLORS: Record<string, string> = {
  pass: "#9e9e9e",
  fail: "#d32f2f",
};

export function statusColor(status: string): string {
  return STATUS_COLORS[status] ?? STATUS_COLORS.fail;
}

export const SEVERITY_COLORS: Record<string, string> = {
  fatal: "#d32f2f",
  warning: "#f9a825",
  info: "#90a4ae",
};

/**
 * Freehand lasso selection over positioned dots.
 *
 * Dragging draws a polygon; on release, every dot whose center lies inside
 * the polygon is reported. A selection of fewer than three polygon vertices
 * (a click) reports nothing.
 */

export type Point = [number, number];

export interface Positioned {
  nodeId: number;
  x: number;
  y: number;
}

/** Ray-casting point-in-polygon; boundary points count as inside. */
export function pointInPolygon(pt: Point, polygon: Point[]): boolean {
  if (polygon.length < 3) return false;
  const [px, py] = pt;
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    // on-edge check: collinear and within the segment's bounding box
    const cross = (xj - xi) * (py - yi) - (yj - yi) * (px - xi);
    if (
      Math.abs(cross) < 1e-9 &&
      Math.min(xi, xj) - 1e-9 <= px &&
      px <= Math.max(xi, xj) + 1e-9 &&
      Math.min(yi, yj) - 1e-9 <= py &&
      py <= Math.max(yi, yj) + 1e-9
    ) {
      return true;
    }
    if (yi > py !== yj > py && px < ((xj - xi) * (py - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

export function nodesInPolygon(dots: Positioned[], polygon: Point[]): number[] {
  return dots.filter((d) => pointInPolygon([d.x, d.y], polygon)).map((d) => d.nodeId);
}

/**
 * Wire lasso gestures onto `svg`. Returns a detach function.
 *
 * `getDots` is consulted at release time so zooming between gestures is
 * reflected, and `onSelect` fires only for non-empty selections.
 */
export function attachLasso(
  svg: SVGSVGElement,
  getDots: () => Positioned[],
  onSelect: (nodeIds: number[]) => void,
): () => void {
  let polygon: Point[] = [];
  let active = false;
  let path: SVGPathElement | null = null;

  const toLocal = (ev: MouseEvent): Point => {
    const rect = svg.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  };

  const redraw = (): void => {
    if (!path) {
      path = svg.ownerDocument.createElementNS("http://www.w3.org/2000/svg", "path");
      path.setAttribute("class", "lasso-path");
      path.setAttribute("fill", "rgba(33, 150, 243, 0.08)");
      path.setAttribute("stroke", "#2196f3");
      path.setAttribute("stroke-dasharray", "4,3");
      svg.appendChild(path);
    }
    const d = polygon.length
      ? `M${polygon.map(([x, y]) => `${x},${y}`).join("L")}Z`
      : "";
    path.setAttribute("d", d);
  };

  const down = (ev: Event): void => {
    active = true;
    polygon = [toLocal(ev as MouseEvent)];
    redraw();
  };
  const move = (ev: Event): void => {
    if (!active) return;
    polygon.push(toLocal(ev as MouseEvent));
    redraw();
  };
  const up = (): void => {
    if (!active) return;
    active = false;
    const selected = polygon.length >= 3 ? nodesInPolygon(getDots(), polygon) : [];
    polygon = [];
    redraw();
    if (selected.length) onSelect(selected);
  };

  svg.addEventListener("pointerdown", down);
  svg.addEventListener("pointermove", move);
  svg.addEventListener("pointerup", up);
  return () => {
    svg.removeEventListener("pointerdown", down);
    svg.removeEventListener("pointermove", move);
    svg.removeEventListener("pointerup", up);
  };
}

// Render-model-to-SVG-DOM view. No client-side layout: geometry arrives
// absolute from the server (or from prediction deltas) and is drawn 1:1.
// Every group carries data-eid for hit-testing back to element ids.

import { ElementGeometry } from "./controller.js";
import { Route } from "./protocol.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function attr(el: Element, name: string, value: string | number): void {
  el.setAttribute(name, String(value));
}

function routePath(route: Route): string {
  const parts: string[] = [];
  let cursor: [number, number] | null = null;
  for (const segment of route.segments) {
    const pts = segment.points;
    if (!cursor || cursor[0] !== pts[0][0] || cursor[1] !== pts[0][1]) {
      parts.push(`M ${pts[0][0]} ${pts[0][1]}`);
    }
    if (segment.mode === "bezier") {
      const [, c1, c2, p1] = pts;
      parts.push(`C ${c1[0]} ${c1[1]}, ${c2[0]} ${c2[1]}, ${p1[0]} ${p1[1]}`);
      cursor = p1;
    } else {
      for (const p of pts.slice(1)) {
        parts.push(`L ${p[0]} ${p[1]}`);
      }
      cursor = pts[pts.length - 1];
    }
  }
  return parts.join(" ");
}

function markerPath(route: Route, atStart: boolean): string | null {
  const marker = atStart ? route.startMarker : route.endMarker;
  if (!marker) {
    return null;
  }
  const first = route.segments[0].points;
  const last = route.segments[route.segments.length - 1].points;
  const tip = atStart ? first[0] : last[last.length - 1];
  const prev = atStart ? first[1] : last[last.length - 2];
  let dx = tip[0] - prev[0];
  let dy = tip[1] - prev[1];
  const norm = Math.hypot(dx, dy) || 1;
  dx /= norm;
  dy /= norm;
  const nx = -dy;
  const ny = dx;
  const s = route.markerSize;
  const pt = (back: number, side: number) =>
    `${tip[0] - dx * back + nx * side} ${tip[1] - dy * back + ny * side}`;
  switch (marker) {
    case "openArrow":
      return `M ${pt(s, s * 0.4)} L ${tip[0]} ${tip[1]} L ${pt(s, -s * 0.4)}`;
    case "triangleHollow":
      return `M ${tip[0]} ${tip[1]} L ${pt(s, s * 0.5)} L ${pt(s, -s * 0.5)} Z`;
    case "diamondHollow":
    case "diamondFilled":
      return `M ${tip[0]} ${tip[1]} L ${pt(s / 2, s * 0.35)} L ${pt(s, 0)} L ${pt(s / 2, -s * 0.35)} Z`;
    case "cross": {
      const cx = tip[0] - (dx * s) / 2;
      const cy = tip[1] - (dy * s) / 2;
      const h = s / 2 / 1.414;
      return (
        `M ${cx - (dx + nx) * h} ${cy - (dy + ny) * h} L ${cx + (dx + nx) * h} ${cy + (dy + ny) * h}` +
        ` M ${cx - (dx - nx) * h} ${cy - (dy - ny) * h} L ${cx + (dx - nx) * h} ${cy + (dy - ny) * h}`
      );
    }
    default:
      return null;
  }
}

export function drawView(container: SVGSVGElement, elements: ElementGeometry[]): void {
  while (container.firstChild) {
    container.removeChild(container.firstChild);
  }
  if (elements.length === 0) {
    return;
  }
  const root = elements[0];
  attr(container, "viewBox", `${root.x} ${root.y} ${root.width} ${root.height}`);

  for (const element of elements) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("data-eid", element.id);
    const a = element.attributes;
    if (element.kind === "rect" || element.kind === "canvasElement") {
      if (element.kind === "rect") {
        const rect = document.createElementNS(SVG_NS, "rect");
        attr(rect, "x", element.x);
        attr(rect, "y", element.y);
        attr(rect, "width", element.width);
        attr(rect, "height", element.height);
        attr(rect, "fill", String(a.fill ?? "none"));
        attr(rect, "stroke", String(a.stroke ?? "#000"));
        attr(rect, "stroke-width", String(a.strokeWidth ?? 1));
        group.appendChild(rect);
      } else {
        // invisible hit area so drags land on the class element itself
        const hit = document.createElementNS(SVG_NS, "rect");
        attr(hit, "x", element.x);
        attr(hit, "y", element.y);
        attr(hit, "width", element.width);
        attr(hit, "height", element.height);
        attr(hit, "fill", "transparent");
        group.appendChild(hit);
      }
    } else if (element.kind === "text" || element.kind === "label") {
      const text = document.createElementNS(SVG_NS, "text");
      attr(text, "x", element.x);
      attr(text, "y", element.y + element.height * 0.72);
      attr(text, "font-family", String(a.fontFamily ?? "sans-serif"));
      attr(text, "font-size", String(a.fontSize ?? 12));
      attr(text, "fill", String(a.textFill ?? "#000"));
      if (a.fontWeight) attr(text, "font-weight", String(a.fontWeight));
      if (a.fontStyle) attr(text, "font-style", String(a.fontStyle));
      text.textContent = String(a.text ?? "");
      group.appendChild(text);
    } else if (element.kind === "canvasConnection" && element.route) {
      const path = document.createElementNS(SVG_NS, "path");
      attr(path, "d", routePath(element.route));
      attr(path, "fill", "none");
      attr(path, "stroke", String(a.stroke ?? "#000"));
      attr(path, "stroke-width", String(a.strokeWidth ?? 1));
      if (a.strokeDasharray) attr(path, "stroke-dasharray", String(a.strokeDasharray));
      group.appendChild(path);
      for (const atStart of [true, false]) {
        const d = markerPath(element.route, atStart);
        if (!d) continue;
        const markerEl = document.createElementNS(SVG_NS, "path");
        attr(markerEl, "d", d);
        const kind = atStart ? element.route.startMarker : element.route.endMarker;
        const filled = kind === "diamondFilled";
        const hollow = kind === "triangleHollow" || kind === "diamondHollow";
        attr(markerEl, "fill", filled ? String(a.stroke ?? "#000") : hollow ? "#fff" : "none");
        attr(markerEl, "stroke", String(a.stroke ?? "#000"));
        group.appendChild(markerEl);
      }
    }
    container.appendChild(group);
  }
}

/** Nearest draggable ancestor id for a hit-test result. */
export function hitElementId(target: Element | null): string | null {
  let node: Element | null = target;
  while (node) {
    const eid = node.getAttribute?.("data-eid");
    if (eid) {
      return eid;
    }
    node = node.parentElement;
  }
  return null;
}

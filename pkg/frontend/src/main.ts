// Browser entry: split-pane hybrid editor wired to the session server.
// Text on the left, interactive canvas on the right; drags stream
// interaction updates, double-click reveals the defining source span.

import { EditorController } from "./controller.js";
import { webSocketFactory } from "./client.js";
import { drawView, hitElementId } from "./svg.js";

const INITIAL = `classDiagram {
    class("Menu") {
        public { "count : int" }
        layout { pos = apos(60, 40) }
    }
    class("Dish") { layout { pos = apos(340, 120) } }
    Menu --> Dish with { label("1..*", 0.85, 8) }
}
`;

function query(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

export function start(): void {
  const textPane = query("text-pane") as HTMLTextAreaElement;
  const canvas = query("canvas-pane") as unknown as SVGSVGElement;
  const status = query("status");
  const diagnosticsPane = query("diagnostics");

  const params = new URLSearchParams(window.location.search);
  const port = params.get("port") ?? "8787";
  const uri = params.get("doc") ?? "web-session.ds";
  textPane.value = INITIAL;

  const controller = new EditorController(
    uri,
    INITIAL,
    `ws://${window.location.hostname || "127.0.0.1"}:${port}`,
    webSocketFactory,
    {
      onText: (text, caret) => {
        textPane.value = text;
        textPane.setSelectionRange(caret, caret);
      },
      onView: () => drawView(canvas, controller.viewGeometry()),
      onStatus: (message) => {
        status.textContent = message;
      },
      onDiagnostics: (items) => {
        diagnosticsPane.textContent = items
          .map((d) => `${d.severity}: ${d.message}`)
          .join("\n");
      },
      onSelect: ([start_, end]) => {
        textPane.focus();
        textPane.setSelectionRange(start_, end);
      },
    },
  );

  textPane.addEventListener("input", () => {
    controller.userEdited(textPane.value, textPane.selectionStart ?? 0);
  });

  const toDiagram = (event: PointerEvent | MouseEvent): [number, number] => {
    const point = canvas.createSVGPoint();
    point.x = event.clientX;
    point.y = event.clientY;
    const ctm = canvas.getScreenCTM();
    if (!ctm) return [event.clientX, event.clientY];
    const mapped = point.matrixTransform(ctm.inverse());
    return [mapped.x, mapped.y];
  };

  canvas.addEventListener("pointerdown", (event) => {
    const eid = hitElementId(event.target as Element);
    if (!eid) return;
    const [x, y] = toDiagram(event);
    void controller.startDrag(eid, "moveElement", x, y).then((ok) => {
      if (ok) canvas.setPointerCapture(event.pointerId);
    });
  });
  canvas.addEventListener("pointermove", (event) => {
    if (!controller.dragging) return;
    const [x, y] = toDiagram(event);
    void controller.moveDrag(x, y);
  });
  const finish = () => void controller.endDrag();
  canvas.addEventListener("pointerup", finish);
  canvas.addEventListener("pointercancel", finish);
  window.addEventListener("beforeunload", () => controller.close());

  canvas.addEventListener("dblclick", (event) => {
    const eid = hitElementId(event.target as Element);
    if (eid) void controller.revealSource(eid);
  });

  controller.connect();
}

start();

import { describe, expect, it } from "vitest";

import { EditorController } from "../src/controller.js";
import { adjustCaret, applyEdits, minimalEdit } from "../src/text.js";
import { FakeServer, MODEL, flush } from "./fake.js";

const TEXT = 'classDiagram {\n    class("Menu") { layout { pos = apos(100, 200) } }\n}\n';

function makeController(server: FakeServer, events = {}) {
  const controller = new EditorController(
    "doc.ds", TEXT, "ws://fake", server.factory, events,
    (fn, _ms) => setTimeout(fn, 0),  // immediate reconnects in tests
  );
  controller.connect();
  return controller;
}

describe("text helpers", () => {
  it("computes minimal edits", () => {
    expect(minimalEdit("abc", "abc")).toBeNull();
    expect(minimalEdit("x = 100", "x = 130")).toEqual({ span: [5, 6], newText: "3" });
    expect(minimalEdit("ab", "aXYb")).toEqual({ span: [1, 1], newText: "XY" });
    expect(minimalEdit("aXYb", "ab")).toEqual({ span: [1, 3], newText: "" });
  });

  it("applies server edit batches right to left", () => {
    const text = "apos(100, 200)";
    const edits = [
      { span: [5, 8] as [number, number], newText: "130" },
      { span: [10, 13] as [number, number], newText: "187.5" },
    ];
    expect(applyEdits(text, edits)).toBe("apos(130, 187.5)");
  });

  it("preserves the caret outside edited spans", () => {
    const edits = [{ span: [5, 8] as [number, number], newText: "7" }];
    expect(adjustCaret(2, edits)).toBe(2);     // before the edit
    expect(adjustCaret(10, edits)).toBe(8);    // after: shifted by -2
    expect(adjustCaret(6, edits)).toBe(6);     // inside: clamped to new end
  });
});

describe("connect and sync", () => {
  it("opens then subscribes on connect", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    makeController(server);
    await flush();
    expect(server.requests.map((r) => r.method)).toEqual([
      "document/open",
      "document/subscribe",
    ]);
    expect(server.requests[0].params.text).toBe(TEXT);
  });

  it("applies full updates and ignores stale sequence numbers", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    let views = 0;
    const controller = makeController(server, { onView: () => views++ });
    await flush();
    server.notify("diagram/update", { uri: "doc.ds", seq: 2, version: 0, renderModel: MODEL });
    server.notify("diagram/update", { uri: "doc.ds", seq: 1, version: 0, renderModel: MODEL });
    await flush();
    expect(controller.seq).toBe(2);
    expect(views).toBe(1);
    const element = controller.geometryOf("canvas0/canvasElement0");
    expect(element?.x).toBe(100);
  });

  it("composes the latest prediction onto the base model, replacing earlier ones", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    const controller = makeController(server);
    await flush();
    server.notify("diagram/update", { uri: "doc.ds", seq: 1, version: 0, renderModel: MODEL });
    server.notify("diagram/incremental", {
      uri: "doc.ds", basedOnSeq: 1,
      deltas: [{ id: "canvas0/canvasElement0", ddx: 10, ddy: 0, x: 110, y: 200, width: 60, height: 30 }],
    });
    server.notify("diagram/incremental", {
      uri: "doc.ds", basedOnSeq: 1,
      deltas: [{ id: "canvas0/canvasElement0", ddx: 25, ddy: 0, x: 125, y: 200, width: 60, height: 30 }],
    });
    await flush();
    // latest prediction wins and is NOT additive with the previous one
    expect(controller.geometryOf("canvas0/canvasElement0")?.x).toBe(125);
    // stale prediction for another base seq is dropped
    server.notify("diagram/incremental", {
      uri: "doc.ds", basedOnSeq: 0,
      deltas: [{ id: "canvas0/canvasElement0", ddx: 99, ddy: 0, x: 999, y: 200, width: 60, height: 30 }],
    });
    await flush();
    expect(controller.geometryOf("canvas0/canvasElement0")?.x).toBe(125);
    // the next full update clears predictions
    server.notify("diagram/update", { uri: "doc.ds", seq: 2, version: 1, renderModel: MODEL });
    await flush();
    expect(controller.geometryOf("canvas0/canvasElement0")?.x).toBe(100);
  });
});

describe("echo guard", () => {
  it("does not send document/change for server-initiated edits", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    const texts: Array<[string, boolean]> = [];
    const controller = makeController(server, {
      onText: (text: string, _caret: number, fromServer: boolean) => texts.push([text, fromServer]),
    });
    await flush();
    server.notify("document/edit", {
      uri: "doc.ds", version: 1,
      edits: [{ span: [55, 58], newText: "140" }],
    });
    await flush();
    await new Promise((resolve) => setTimeout(resolve, 400));
    expect(controller.text).toContain("apos(140, 200)");
    expect(texts[0][1]).toBe(true);
    expect(server.requests.filter((r) => r.method === "document/change")).toHaveLength(0);
    expect(controller.version).toBe(1);
  });

  it("debounces user edits into one document/change", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    server.handlers.set("document/change", () => ({ version: 1 }));
    const controller = makeController(server);
    await flush();
    controller.userEdited(TEXT + "x", TEXT.length + 1);
    controller.userEdited(TEXT + "x = 1", TEXT.length + 5);
    await new Promise((resolve) => setTimeout(resolve, 400));
    const changes = server.requests.filter((r) => r.method === "document/change");
    expect(changes).toHaveLength(1);
    expect((changes[0].params.edits as Array<{ newText: string }>)[0].newText).toBe("x = 1");
    expect(changes[0].params.version).toBe(1);
  });
});

describe("interactions", () => {
  it("emits a well-formed start/update*/end sequence with cumulative params", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    const controller = makeController(server);
    await flush();
    await controller.startDrag("canvas0/canvasElement0", "moveElement", 500, 400);
    await controller.moveDrag(530, 410);
    await controller.moveDrag(600, 390);
    await controller.endDrag();
    const methods = server.requests.map((r) => r.method).slice(2);
    expect(methods).toEqual([
      "interaction/start", "interaction/update", "interaction/update", "interaction/end",
    ]);
    const updates = server.requests.filter((r) => r.method === "interaction/update");
    expect(updates.map((u) => u.params.params)).toEqual([
      { dx: 30, dy: 10 },
      { dx: 100, dy: -10 },
    ]);
  });

  it("emits interaction/end when closed mid-drag", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    const controller = makeController(server);
    await flush();
    await controller.startDrag("canvas0/canvasElement0", "moveElement", 0, 0);
    controller.close();
    await flush();
    expect(server.requests.map((r) => r.method)).toContain("interaction/end");
  });

  it("surfaces NotEditable refusals with the source span", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    server.handlers.set("interaction/start", () => {
      throw { code: 1003, message: "position is computed", data: { span: [40, 50] } };
    });
    const statuses: string[] = [];
    const selections: Array<[number, number]> = [];
    const controller = makeController(server, {
      onStatus: (s: string) => statuses.push(s),
      onSelect: (span: [number, number]) => selections.push(span),
    });
    await flush();
    const ok = await controller.startDrag("canvas0/canvasElement0", "moveElement", 0, 0);
    expect(ok).toBe(false);
    expect(controller.dragging).toBe(false);
    expect(statuses.some((s) => s.includes("not editable"))).toBe(true);
    expect(selections).toEqual([[40, 50]]);
  });
});

describe("reconnect", () => {
  it("replays document/open with the current text after a drop", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    const statuses: string[] = [];
    const controller = makeController(server, { onStatus: (s: string) => statuses.push(s) });
    await flush();
    server.notify("document/edit", {
      uri: "doc.ds", version: 1, edits: [{ span: [55, 58], newText: "777" }],
    });
    await flush();
    server.sockets[0].dropConnection();
    await new Promise((resolve) => setTimeout(resolve, 30));
    expect(server.sockets.length).toBe(2);
    const opens = server.requests.filter((r) => r.method === "document/open");
    expect(opens).toHaveLength(2);
    expect(opens[1].params.text).toBe(controller.text);
    expect(String(opens[1].params.text)).toContain("777");
    expect(statuses.some((s) => s.includes("reconnecting"))).toBe(true);
  });
});

describe("reveal", () => {
  it("selects the defining span", async () => {
    const server = new FakeServer();
    server.handlers.set("document/open", () => ({ version: 0 }));
    server.handlers.set("source/reveal", () => ({ span: [19, 82] }));
    const selections: Array<[number, number]> = [];
    const controller = makeController(server, {
      onSelect: (span: [number, number]) => selections.push(span),
    });
    await flush();
    const span = await controller.revealSource("canvas0/canvasElement0");
    expect(span).toEqual([19, 82]);
    expect(selections).toEqual([[19, 82]]);
  });
});

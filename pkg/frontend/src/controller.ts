// The hybrid editor's client-side brain, free of DOM dependencies.
//
// State it owns: the document text (mirroring the server), the last full
// render model plus the latest prediction deltas, and the active pointer
// interaction. Everything visual derives from that: the view recomposes the
// base model with the newest deltas (each prediction replaces the previous
// one; the absolute fields are authoritative). A page reload reproduces the
// identical view from server state alone.

import { ProtocolClient, SocketFactory } from "./client.js";
import {
  Delta,
  DiagnosticItem,
  InteractionKind,
  ModelElement,
  Notification,
  NOT_EDITABLE,
  RenderModel,
  RequestError,
  Route,
  WireEdit,
} from "./protocol.js";
import { adjustCaret, applyEdits, minimalEdit } from "./text.js";

export interface ElementGeometry {
  id: string;
  kind: string;
  x: number;
  y: number;
  width: number;
  height: number;
  attributes: Record<string, unknown>;
  route?: Route;
}

export interface ControllerEvents {
  /** Text changed; fromServer distinguishes server edits from local echo. */
  onText?: (text: string, caret: number, fromServer: boolean) => void;
  /** The composed view changed (full update or prediction). */
  onView?: () => void;
  onDiagnostics?: (items: DiagnosticItem[]) => void;
  onStatus?: (status: string) => void;
  onSelect?: (span: [number, number]) => void;
}

const DEBOUNCE_MS = 150;

export class EditorController {
  private client: ProtocolClient;
  text = "";
  version = 0;
  caret = 0;
  seq = 0;
  model: RenderModel | null = null;
  private deltas = new Map<string, Delta>();
  private interaction: { kind: InteractionKind; originX: number; originY: number } | null = null;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private reconnectDelay = 250;
  private closed = false;
  connected = false;

  constructor(
    private uri: string,
    initialText: string,
    url: string,
    factory: SocketFactory,
    private events: ControllerEvents = {},
    private scheduleReconnect: (fn: () => void, ms: number) => void = (fn, ms) => {
      setTimeout(fn, ms);
    },
  ) {
    this.text = initialText;
    this.client = new ProtocolClient(url, factory);
    this.client.onNotification = (note) => this.handleNotification(note);
    this.client.onOpen = () => {
      void this.resync();
    };
    this.client.onClose = () => {
      this.connected = false;
      if (this.closed) {
        return;
      }
      this.events.onStatus?.("connection lost; reconnecting");
      this.scheduleReconnect(() => this.client.connect(), this.reconnectDelay);
      this.reconnectDelay = Math.min(this.reconnectDelay * 2, 5000);
    };
  }

  connect(): void {
    this.client.connect();
  }

  close(): void {
    this.closed = true;
    if (this.interaction) {
      void this.client.request("interaction/end", { uri: this.uri }).catch(() => {});
      this.interaction = null;
    }
    this.client.close();
  }

  /** document/open replay on every (re)connect, then subscribe. */
  private async resync(): Promise<void> {
    try {
      const opened = await this.client.request<{ version: number }>("document/open", {
        uri: this.uri,
        text: this.text,
      });
      this.version = opened.version;
      this.serverText = this.text;
      this.seq = 0;
      this.model = null;
      this.deltas.clear();
      await this.client.request("document/subscribe", { uri: this.uri });
      this.connected = true;
      this.reconnectDelay = 250;
      this.events.onStatus?.("connected");
    } catch (err) {
      this.events.onStatus?.(`sync failed: ${(err as Error).message}`);
    }
  }

  // text pane

  /** Host editors call this for USER input only; server edits never echo. */
  userEdited(newText: string, caret: number): void {
    this.text = newText;
    this.caret = caret;
    if (this.debounceTimer !== null) {
      clearTimeout(this.debounceTimer);
    }
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.flushUserEdit();
    }, DEBOUNCE_MS);
  }

  private sentText: string | null = null;

  private async flushUserEdit(): Promise<void> {
    if (!this.connected) {
      return;
    }
    if (this.sentText !== null) {
      // a change is in flight; try again once it settles
      this.debounceTimer = setTimeout(() => {
        this.debounceTimer = null;
        void this.flushUserEdit();
      }, DEBOUNCE_MS);
      return;
    }
    const edit = minimalEdit(this.serverText, this.text);
    if (edit === null) {
      return;
    }
    this.sentText = this.text;
    try {
      const reply = await this.client.request<{ version: number }>("document/change", {
        uri: this.uri,
        version: this.version + 1,
        edits: [edit],
      });
      this.version = reply.version;
      this.serverText = this.sentText;
      this.sentText = null;
    } catch (err) {
      this.sentText = null;
      this.events.onStatus?.(`edit rejected: ${(err as Error).message}`);
    }
  }

  private serverText = "";

  private handleServerEdits(version: number, edits: WireEdit[]): void {
    this.text = applyEdits(this.text, edits);
    this.serverText = this.text;
    this.caret = adjustCaret(this.caret, edits);
    this.version = version;
    this.events.onText?.(this.text, this.caret, true);
  }

  // notifications

  private handleNotification(note: Notification): void {
    if (note.params.uri !== this.uri) {
      return;
    }
    switch (note.method) {
      case "diagram/update": {
        if (note.params.seq <= this.seq) {
          return; // stale: never show an older full update
        }
        this.seq = note.params.seq;
        this.model = note.params.renderModel;
        this.deltas.clear();
        this.events.onView?.();
        break;
      }
      case "diagram/incremental": {
        if (note.params.basedOnSeq !== this.seq) {
          return; // prediction for a render this client no longer shows
        }
        // the newest prediction replaces earlier ones relative to the base
        this.deltas.clear();
        for (const delta of note.params.deltas) {
          this.deltas.set(delta.id, delta);
        }
        this.events.onView?.();
        break;
      }
      case "diagram/diagnostics": {
        this.events.onDiagnostics?.(note.params.items);
        break;
      }
      case "document/edit": {
        this.handleServerEdits(note.params.version, note.params.edits);
        break;
      }
    }
  }

  // view composition

  /** Flat geometry: the base model overridden by the latest deltas. */
  viewGeometry(): ElementGeometry[] {
    if (!this.model) {
      return [];
    }
    const out: ElementGeometry[] = [];
    const visit = (element: ModelElement) => {
      const delta = this.deltas.get(element.id);
      out.push({
        id: element.id,
        kind: element.kind,
        x: delta ? delta.x : element.x,
        y: delta ? delta.y : element.y,
        width: delta ? delta.width : element.width,
        height: delta ? delta.height : element.height,
        attributes: element.attributes,
        route: delta?.route ?? element.route,
      });
      for (const child of element.children) {
        visit(child);
      }
    };
    visit(this.model.root);
    return out;
  }

  geometryOf(id: string): ElementGeometry | undefined {
    return this.viewGeometry().find((g) => g.id === id);
  }

  originSpanOf(id: string): [number, number] | null {
    if (!this.model) {
      return null;
    }
    let found: [number, number] | null = null;
    const visit = (element: ModelElement) => {
      if (element.id === id) {
        found = element.originSpan;
        return;
      }
      for (const child of element.children) {
        visit(child);
      }
    };
    visit(this.model.root);
    return found;
  }

  // pointer interactions

  async startDrag(elementId: string, kind: InteractionKind, pointerX: number, pointerY: number): Promise<boolean> {
    try {
      await this.client.request("interaction/start", {
        uri: this.uri,
        elementId,
        kind,
      });
      this.interaction = { kind, originX: pointerX, originY: pointerY };
      return true;
    } catch (err) {
      if (err instanceof RequestError && err.code === NOT_EDITABLE) {
        this.events.onStatus?.(`not editable: ${err.message}`);
        const span = err.data?.span;
        if (span) {
          this.events.onSelect?.(span);
        }
      } else {
        this.events.onStatus?.(`drag refused: ${(err as Error).message}`);
      }
      return false;
    }
  }

  async moveDrag(pointerX: number, pointerY: number): Promise<void> {
    if (!this.interaction) {
      return;
    }
    const dx = pointerX - this.interaction.originX;
    const dy = pointerY - this.interaction.originY;
    const params =
      this.interaction.kind === "resizeElement"
        ? { dWidth: dx, dHeight: dy }
        : { dx, dy };
    try {
      await this.client.request("interaction/update", { uri: this.uri, params });
    } catch (err) {
      this.events.onStatus?.(`update refused: ${(err as Error).message}`);
      this.interaction = null;
    }
  }

  async endDrag(): Promise<void> {
    if (!this.interaction) {
      return;
    }
    this.interaction = null;
    await this.client.request("interaction/end", { uri: this.uri }).catch(() => {});
  }

  get dragging(): boolean {
    return this.interaction !== null;
  }

  // reveal-source

  async revealSource(elementId: string): Promise<[number, number] | null> {
    try {
      const reply = await this.client.request<{ span: [number, number] }>("source/reveal", {
        uri: this.uri,
        elementId,
      });
      this.events.onSelect?.(reply.span);
      return reply.span;
    } catch {
      return null;
    }
  }

  async exportSvg(): Promise<string> {
    const reply = await this.client.request<{ content: string }>("diagram/export", {
      uri: this.uri,
      format: "svg",
    });
    return reply.content;
  }
}

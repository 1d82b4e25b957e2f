// Wire types for the session protocol (version 1). See docs/protocol.md in
// the repository root; the server is the source of truth for these shapes.

export interface RouteSegment {
  mode: "line" | "axisAligned" | "bezier";
  points: [number, number][];
}

export interface Route {
  segments: RouteSegment[];
  startMarker: string | null;
  endMarker: string | null;
  markerSize: number;
}

export interface ModelElement {
  id: string;
  kind: string;
  x: number;
  y: number;
  width: number;
  height: number;
  attributes: Record<string, unknown>;
  originSpan: [number, number] | null;
  children: ModelElement[];
  route?: Route;
}

export interface RenderModel {
  schemaVersion: number;
  root: ModelElement;
}

export interface Delta {
  id: string;
  ddx: number;
  ddy: number;
  x: number;
  y: number;
  width: number;
  height: number;
  route?: Route;
}

export interface WireEdit {
  span: [number, number];
  newText: string;
}

export interface DiagnosticItem {
  severity: "error" | "warning" | "info";
  span: [number, number] | null;
  message: string;
}

export interface UpdateParams {
  uri: string;
  seq: number;
  version: number;
  renderModel: RenderModel;
}

export interface IncrementalParams {
  uri: string;
  basedOnSeq: number;
  deltas: Delta[];
}

export interface DiagnosticsParams {
  uri: string;
  version: number;
  items: DiagnosticItem[];
}

export interface DocumentEditParams {
  uri: string;
  version: number;
  edits: WireEdit[];
}

export type Notification =
  | { method: "diagram/update"; params: UpdateParams }
  | { method: "diagram/incremental"; params: IncrementalParams }
  | { method: "diagram/diagnostics"; params: DiagnosticsParams }
  | { method: "document/edit"; params: DocumentEditParams };

export interface ErrorBody {
  code: number;
  message: string;
  data?: { span?: [number, number] | null };
}

export class RequestError extends Error {
  code: number;
  data?: ErrorBody["data"];

  constructor(body: ErrorBody) {
    super(body.message);
    this.code = body.code;
    this.data = body.data;
  }
}

export type InteractionKind =
  | "moveElement"
  | "resizeElement"
  | "moveConnectionAnchor"
  | "moveLabel";

export const NOT_EDITABLE = 1003;
export const SESSION_STALE = 1004;
export const STALE_DOCUMENT = 1010;

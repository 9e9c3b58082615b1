// Frame protocol messages: newline-delimited `verb {json}` lines.
// Mirrors the server contract exactly; see the engine's protocol docs.

export const PROTOCOL_VERSION = 1;

export interface BoxPayload {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  glyph: string;
  depth: number;
}

export interface MetricsPayload {
  elapsed_s: number;
  chars: number;
  wpm: number;
}

export interface ParamsPayload {
  rate: number;
  crosshair_x: number;
  protocol_version: number;
}

export interface RenderPayload {
  boxes: BoxPayload[];
  committed: string;
  delta: { removed: number; added: string };
  metrics: MetricsPayload;
  params: ParamsPayload;
}

export interface WelcomePayload {
  glyphs: string[];
  params: ParamsPayload;
}

export type ServerMessage =
  | { verb: "welcome"; payload: WelcomePayload }
  | { verb: "render"; payload: RenderPayload }
  | { verb: "ok"; payload: Record<string, unknown> }
  | { verb: "bye"; payload: Record<string, unknown> }
  | { verb: "error"; payload: { message: string } };

export function encodeLine(verb: string, payload: unknown): string {
  return `${verb} ${JSON.stringify(payload)}`;
}

export function decodeLine(line: string): ServerMessage {
  const trimmed = line.trim();
  const space = trimmed.indexOf(" ");
  const verb = space < 0 ? trimmed : trimmed.slice(0, space);
  const rest = space < 0 ? "" : trimmed.slice(space + 1);
  let payload: unknown = {};
  if (rest) {
    payload = JSON.parse(rest);
  }
  switch (verb) {
    case "welcome": {
      const p = payload as WelcomePayload;
      if (!Array.isArray(p.glyphs) || typeof p.params?.rate !== "number") {
        throw new Error("malformed welcome payload");
      }
      return { verb, payload: p };
    }
    case "render": {
      const p = payload as RenderPayload;
      if (!Array.isArray(p.boxes) || typeof p.committed !== "string") {
        throw new Error("malformed render payload");
      }
      return { verb, payload: p };
    }
    case "ok":
      return { verb, payload: payload as Record<string, unknown> };
    case "bye":
      return { verb, payload: payload as Record<string, unknown> };
    case "error": {
      const p = payload as { message?: unknown };
      return { verb, payload: { message: String(p.message ?? "unknown error") } };
    }
    default:
      throw new Error(`unknown server verb ${JSON.stringify(verb)}`);
  }
}

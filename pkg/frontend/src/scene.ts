// Pure mapping from a render payload to drawable primitives.
//
// The UI holds no geometry of its own: every rectangle below is the
// payload's unit-square box scaled by the canvas size, nothing else.
// That is what makes the logged-frame replay comparison meaningful.

import { BoxPayload, RenderPayload } from "./protocol.js";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
  glyph: string;
  depth: number;
  fill: string;
}

export interface TextRun {
  text: string;
  highlighted: boolean;
}

export interface Scene {
  rects: Rect[];
  committedRuns: TextRun[];
  wpm: number;
  elapsedS: number;
  chars: number;
}

const PALETTE = ["#2b4a6f", "#38618c", "#4678a8", "#558fc4", "#66a6df", "#79bdf9"];

export function depthFill(depth: number): string {
  return PALETTE[Math.min(depth - 1, PALETTE.length - 1)] ?? PALETTE[0]!;
}

export function boxToRect(box: BoxPayload, width: number, height: number): Rect {
  return {
    x: box.x0 * width,
    y: box.y0 * height,
    w: (box.x1 - box.x0) * width,
    h: (box.y1 - box.y0) * height,
    glyph: box.glyph,
    depth: box.depth,
    fill: depthFill(box.depth),
  };
}

export function buildScene(payload: RenderPayload, width: number, height: number): Scene {
  const rects = payload.boxes.map((b) => boxToRect(b, width, height));
  const added = payload.delta.added;
  const committed = payload.committed;
  const base = added ? committed.slice(0, committed.length - added.length) : committed;
  const committedRuns: TextRun[] = [];
  if (base) committedRuns.push({ text: base, highlighted: false });
  if (added) committedRuns.push({ text: added, highlighted: true });
  return {
    rects,
    committedRuns,
    wpm: payload.metrics.wpm,
    elapsedS: payload.metrics.elapsed_s,
    chars: payload.metrics.chars,
  };
}

import { describe, expect, it } from "vitest";

import { RenderPayload } from "../src/protocol.js";
import { buildScene } from "../src/scene.js";

function payload(partial: Partial<RenderPayload> = {}): RenderPayload {
  return {
    boxes: [
      { x0: 0.0, y0: 0.1, x1: 1.0, y1: 0.4, glyph: "a", depth: 1 },
      { x0: 0.5, y0: 0.2, x1: 1.0, y1: 0.3, glyph: "b", depth: 2 },
    ],
    committed: "ab",
    delta: { removed: 0, added: "b" },
    metrics: { elapsed_s: 2.0, chars: 2, wpm: 12.0 },
    params: { rate: 8, crosshair_x: 0.5, protocol_version: 1 },
    ...partial,
  };
}

describe("buildScene", () => {
  it("scales every rectangle straight from the payload", () => {
    const p = payload();
    const scene = buildScene(p, 800, 600);
    expect(scene.rects).toHaveLength(p.boxes.length);
    p.boxes.forEach((box, i) => {
      const r = scene.rects[i]!;
      expect(r.x).toBeCloseTo(box.x0 * 800, 10);
      expect(r.y).toBeCloseTo(box.y0 * 600, 10);
      expect(r.w).toBeCloseTo((box.x1 - box.x0) * 800, 10);
      expect(r.h).toBeCloseTo((box.y1 - box.y0) * 600, 10);
      expect(r.glyph).toBe(box.glyph);
      expect(r.depth).toBe(box.depth);
    });
  });

  it("keeps no state between payloads", () => {
    const a = buildScene(payload(), 100, 100);
    const b = buildScene(payload({ boxes: [] }), 100, 100);
    expect(b.rects).toHaveLength(0);
    expect(a.rects).toHaveLength(2);
  });

  it("splits committed text into base and highlighted delta", () => {
    const scene = buildScene(payload(), 10, 10);
    expect(scene.committedRuns).toEqual([
      { text: "a", highlighted: false },
      { text: "b", highlighted: true },
    ]);
  });

  it("handles empty delta as a single base run", () => {
    const scene = buildScene(payload({ delta: { removed: 1, added: "" } }), 10, 10);
    expect(scene.committedRuns).toEqual([{ text: "ab", highlighted: false }]);
  });

  it("deeper boxes get distinct shading", () => {
    const scene = buildScene(payload(), 10, 10);
    expect(scene.rects[0]!.fill).not.toBe(scene.rects[1]!.fill);
  });
});

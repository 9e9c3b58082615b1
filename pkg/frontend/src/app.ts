// Browser entry point: canvas rendering and the ~30 Hz frame loop.
//
// One frame request is in flight at a time; each new frame reports the
// wall-clock seconds since the previous render arrived. Everything drawn
// comes verbatim from the last render payload via buildScene.

import { SessionClient } from "./client.js";
import { buildScene } from "./scene.js";
import { WebSocketTransport } from "./transport.js";

const FRAME_INTERVAL_MS = 1000 / 30;

const canvas = document.getElementById("shelf") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const committedEl = document.getElementById("committed")!;
const hudEl = document.getElementById("hud")!;
const rateSlider = document.getElementById("rate") as HTMLInputElement;
const rateLabel = document.getElementById("rate-label")!;
const resetBtn = document.getElementById("reset") as HTMLButtonElement;
const retryBtn = document.getElementById("retry") as HTMLButtonElement;

let client: SessionClient | null = null;
let pointer = { x: 0.5, y: 0.5 };
let lastRenderAt = performance.now();
let loopTimer: number | undefined;

function resize(): void {
  canvas.width = canvas.clientWidth * devicePixelRatio;
  canvas.height = canvas.clientHeight * devicePixelRatio;
}

function showBanner(text: string, isError: boolean): void {
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
  retryBtn.style.display = isError ? "inline-block" : "none";
}

function draw(): void {
  const c = client;
  const W = canvas.width;
  const H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, W, H);
  if (!c || !c.state.lastRender) return;
  const scene = buildScene(c.state.lastRender, W, H);

  const fontPx = Math.max(12 * devicePixelRatio, 14);
  ctx.textBaseline = "middle";
  for (const r of scene.rects) {
    ctx.fillStyle = r.fill;
    ctx.globalAlpha = 0.85;
    ctx.fillRect(r.x, r.y, r.w, r.h);
    ctx.globalAlpha = 1.0;
    ctx.strokeStyle = "#10141a";
    ctx.strokeRect(r.x, r.y, r.w, r.h);
    if (r.h > fontPx * 1.1) {
      ctx.fillStyle = "#f2f6fa";
      ctx.font = `${Math.min(fontPx * 2, r.h * 0.8)}px monospace`;
      const label = r.glyph === " " ? "␣" : r.glyph;
      ctx.fillText(label, r.x + 6 * devicePixelRatio, r.y + r.h / 2);
    }
  }

  // crosshair: zero-rate vertical line
  const cx = c.state.crosshairX * W;
  ctx.strokeStyle = "#e8b339";
  ctx.beginPath();
  ctx.moveTo(cx, 0);
  ctx.lineTo(cx, H);
  ctx.stroke();

  // pointer arrow
  const px = pointer.x * W;
  const py = pointer.y * H;
  ctx.fillStyle = "#ff5d5d";
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px - 14 * devicePixelRatio, py - 6 * devicePixelRatio);
  ctx.lineTo(px - 14 * devicePixelRatio, py + 6 * devicePixelRatio);
  ctx.closePath();
  ctx.fill();

  committedEl.replaceChildren(
    ...scene.committedRuns.map((run) => {
      const span = document.createElement("span");
      span.textContent = run.text;
      if (run.highlighted) span.className = "fresh";
      return span;
    }),
  );
  hudEl.textContent =
    `${scene.wpm.toFixed(1)} words/min · ${scene.chars} chars · ${scene.elapsedS.toFixed(1)}s`;
}

async function frameLoop(): Promise<void> {
  const c = client;
  if (!c || c.state.status !== "live" || c.busy) return;
  const now = performance.now();
  const dt = (now - lastRenderAt) / 1000;
  try {
    await c.frame(pointer.x, pointer.y, dt);
    lastRenderAt = performance.now();
    draw();
  } catch (err) {
    showBanner(`connection lost: ${err}`, true);
    stopLoop();
  }
}

function startLoop(): void {
  stopLoop();
  loopTimer = window.setInterval(() => void frameLoop(), FRAME_INTERVAL_MS);
}

function stopLoop(): void {
  if (loopTimer !== undefined) window.clearInterval(loopTimer);
  loopTimer = undefined;
}

async function connect(): Promise<void> {
  showBanner("connecting…", false);
  try {
    const url = new URL("/session", location.href);
    url.protocol = url.protocol.replace("http", "ws");
    const transport = await WebSocketTransport.connect(url.href);
    client = new SessionClient(transport);
    const welcome = await client.hello();
    showBanner(
      `alphabet: ${welcome.glyphs.map((g) => (g === " " ? "␣" : g)).join("")} · rate ${welcome.params.rate} bits/s`,
      false,
    );
    rateSlider.value = String(welcome.params.rate);
    rateLabel.textContent = `${welcome.params.rate} bits/s`;
    lastRenderAt = performance.now();
    startLoop();
  } catch (err) {
    showBanner(`cannot connect: ${err}`, true);
  }
}

canvas.addEventListener("mousemove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  pointer = {
    x: Math.min(Math.max((ev.clientX - rect.left) / rect.width, 0), 1),
    y: Math.min(Math.max((ev.clientY - rect.top) / rect.height, 0), 1),
  };
});

rateSlider.addEventListener("change", () => {
  const rate = Number(rateSlider.value);
  rateLabel.textContent = `${rate} bits/s`;
  void client?.config({ rate });
});

resetBtn.addEventListener("click", () => void client?.reset());
retryBtn.addEventListener("click", () => void connect());
window.addEventListener("resize", () => {
  resize();
  draw();
});

resize();
void connect();

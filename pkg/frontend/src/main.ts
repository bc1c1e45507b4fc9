// DOM wiring: canvas capture, live trace rendering, probability bars,
// confirm-to-entry-field flow.  The service base URL is configurable via
// ?service=<url> or defaults to the serving origin.

import { InferenceClient } from "./client.js";
import { GlyphSession } from "./session.js";
import { samplePath } from "./spline.js";

const params = new URLSearchParams(window.location.search);
const serviceUrl = params.get("service") ?? window.location.origin;

const canvas = document.getElementById("pad") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const entryField = document.getElementById("entry") as HTMLInputElement;
const topDigitEl = document.getElementById("top-digit")!;
const barsEl = document.getElementById("bars")!;
const bannerEl = document.getElementById("banner")!;
const confirmBtn = document.getElementById("confirm")!;
const clearBtn = document.getElementById("clear")!;
const backspaceBtn = document.getElementById("backspace")!;

const client = new InferenceClient(serviceUrl, {
  onResult: (seq, response) => session.offerResponse(seq, response),
  onStatus: (healthy) => {
    bannerEl.classList.toggle("hidden", healthy);
  },
});

const session = new GlyphSession(
  {
    post: (request, seq) => client.submit(request, seq),
    commit: (digit) => {
      entryField.value += String(digit);
      session.clear();
    },
    render,
  },
  { model: "polar1d" },
);

function render(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.lineWidth = 6;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.strokeStyle = "#111";
  for (const stroke of session.strokes) {
    const path = samplePath(stroke.points);
    if (path.length === 0) continue;
    if (path.length === 1) {
      ctx.beginPath();
      ctx.arc(path[0].x, path[0].y, 3, 0, 2 * Math.PI);
      ctx.fillStyle = "#111";
      ctx.fill();
      continue;
    }
    ctx.beginPath();
    ctx.moveTo(path[0].x, path[0].y);
    for (const p of path.slice(1)) ctx.lineTo(p.x, p.y);
    ctx.stroke();
  }
  renderPrediction();
}

function renderPrediction(): void {
  const { probabilities, top } = session.prediction;
  topDigitEl.textContent = session.isEmpty() ? "–" : String(top);
  const ranked = probabilities
    .map((p, digit) => ({ p, digit }))
    .sort((a, b) => b.p - a.p)
    .slice(0, 3);
  barsEl.innerHTML = "";
  for (const { p, digit } of ranked) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.textContent = String(digit);
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${Math.round(p * 100)}%`;
    track.appendChild(fill);
    const pct = document.createElement("span");
    pct.className = "bar-pct";
    pct.textContent = `${(p * 100).toFixed(0)}%`;
    row.append(label, track, pct);
    barsEl.appendChild(row);
  }
}

function canvasPos(event: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: event.clientX - rect.left, y: event.clientY - rect.top };
}

canvas.addEventListener("pointerdown", (event) => {
  canvas.setPointerCapture(event.pointerId);
  const { x, y } = canvasPos(event);
  session.pointerDown(x, y);
});
canvas.addEventListener("pointermove", (event) => {
  if (event.buttons === 0) return;
  const { x, y } = canvasPos(event);
  session.pointerMove(x, y);
});
canvas.addEventListener("pointerup", () => session.pointerUp());
canvas.addEventListener("pointercancel", () => session.pointerUp());

confirmBtn.addEventListener("click", () => session.confirm());
clearBtn.addEventListener("click", () => session.clear());
backspaceBtn.addEventListener("click", () => {
  entryField.value = entryField.value.slice(0, -1);
});

void client.health();
render();

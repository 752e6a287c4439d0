import init, { SoamDemo, witness_vs_delaunay, witness_landmarks, habituation_curves } from "./pkg/soam_web.js";

const STATES = ["active", "habituated", "connected", "halfdisk", "disk", "boundary", "patch", "singular"];
const COLORS = ["#999", "#5b8", "#48c", "#c8a", "#6ad", "#e93", "#237", "#d22"];

const $ = (id) => document.getElementById(id);
const net = $("net").getContext("2d");

let demo = null;
let running = false;
let drawn = [];
let drawing = false;
// slow rotation for 3D shapes
let angle = 0.6;

$("legend").innerHTML = STATES.map((s, i) => `<span><i style="background:${COLORS[i]}"></i>${s}</span>`).join("");

function project(p, dim) {
  // model units are in [-128, 128] after rescaling
  const s = $("net").width / 300;
  const c = $("net").width / 2;
  if (dim === 2) return [c + p[0] * s, c - p[1] * s];
  const x = p[0] * Math.cos(angle) - p[1] * Math.sin(angle);
  const y = p[0] * Math.sin(angle) + p[1] * Math.cos(angle);
  return [c + x * s, c - (p[2] * 0.9 + y * 0.35) * s];
}

function drawNetwork() {
  const w = $("net").width;
  net.clearRect(0, 0, w, w);
  if (!demo) {
    drawPolyline();
    return;
  }
  const dim = demo.dim();
  const pos = demo.positions();
  const pts = [];
  for (let i = 0; i < pos.length; i += dim) pts.push(project(Array.from(pos.slice(i, i + dim)), dim));
  const tri = demo.triangles();
  net.fillStyle = "rgba(70,130,200,0.12)";
  for (let i = 0; i < tri.length; i += 3) {
    net.beginPath();
    net.moveTo(...pts[tri[i]]);
    net.lineTo(...pts[tri[i + 1]]);
    net.lineTo(...pts[tri[i + 2]]);
    net.fill();
  }
  const edges = demo.edges();
  net.strokeStyle = "#444";
  net.lineWidth = 0.7;
  net.beginPath();
  for (let i = 0; i < edges.length; i += 2) {
    net.moveTo(...pts[edges[i]]);
    net.lineTo(...pts[edges[i + 1]]);
  }
  net.stroke();
  const states = demo.states();
  pts.forEach((p, i) => {
    net.fillStyle = COLORS[states[i]];
    net.fillRect(p[0] - 2, p[1] - 2, 4, 4);
  });
  const counts = demo.state_counts();
  $("status").textContent =
    `signals=${demo.signals()} units=${pts.length} edges=${edges.length / 2} triangles=${tri.length / 3}\n` +
    STATES.map((s, i) => `${s}=${counts[i]}`).join(" ");
}

function drawPolyline() {
  if (drawn.length < 4) return;
  net.strokeStyle = "#aaa";
  net.beginPath();
  net.moveTo(drawn[0], drawn[1]);
  for (let i = 2; i < drawn.length; i += 2) net.lineTo(drawn[i], drawn[i + 1]);
  net.closePath();
  net.stroke();
}

function tick() {
  if (!running || !demo) return;
  const stable = demo.step(Number($("rate").value) || 1000);
  if (demo.dim() === 3) angle += 0.003;
  drawNetwork();
  if (stable) {
    running = false;
    $("status").textContent += "\nstable";
    return;
  }
  requestAnimationFrame(tick);
}

function start() {
  const seed = BigInt($("seed").value || 0);
  const noise = Number($("noise").value) || 0;
  const shape = $("shape").value;
  try {
    if (shape === "drawn") {
      // flip y so the curve is drawn the way it appears on screen
      const c = $("net").width / 2;
      const xy = drawn.map((v, i) => (i % 2 === 0 ? v - c : c - v));
      demo = SoamDemo.drawn(new Float64Array(xy), seed, noise);
    } else {
      demo = new SoamDemo(shape, seed, noise);
    }
  } catch (e) {
    $("status").textContent = String(e);
    return;
  }
  running = true;
  requestAnimationFrame(tick);
}

$("net").addEventListener("pointerdown", (e) => {
  if ($("shape").value !== "drawn") return;
  demo = null;
  running = false;
  drawing = true;
  drawn = [e.offsetX, e.offsetY];
  drawNetwork();
});
$("net").addEventListener("pointermove", (e) => {
  if (!drawing) return;
  drawn.push(e.offsetX, e.offsetY);
  drawNetwork();
});
window.addEventListener("pointerup", () => (drawing = false));

function witness() {
  const n = Number($("lm").value);
  const seed = BigInt($("wseed").value || 0);
  let out;
  try {
    out = witness_vs_delaunay(n, Number($("wit").value), seed);
  } catch (e) {
    $("wstatus").textContent = String(e);
    return;
  }
  const pts = witness_landmarks(n, seed);
  const ctx = $("wcanvas").getContext("2d");
  const s = $("wcanvas").width;
  const at = (i) => [20 + pts[2 * i] * (s - 40), s - 20 - pts[2 * i + 1] * (s - 40)];
  ctx.clearRect(0, 0, s, s);
  const [w, d] = [out[0], out[1]];
  const seg = (k, color, width) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.beginPath();
    ctx.moveTo(...at(out[2 + 2 * k]));
    ctx.lineTo(...at(out[3 + 2 * k]));
    ctx.stroke();
  };
  for (let k = w; k < w + d; k++) seg(k, "#bbb", 5);
  for (let k = 0; k < w; k++) seg(k, "#c22", 1.5);
  ctx.fillStyle = "#000";
  for (let i = 0; i < n; i++) ctx.fillRect(at(i)[0] - 3, at(i)[1] - 3, 6, 6);
  const delaunay = new Set();
  for (let k = w; k < w + d; k++) delaunay.add(`${out[2 + 2 * k]}-${out[3 + 2 * k]}`);
  let inside = 0;
  for (let k = 0; k < w; k++) inside += delaunay.has(`${out[2 + 2 * k]}-${out[3 + 2 * k]}`) ? 1 : 0;
  $("wstatus").textContent = `witness edges=${w} (red) delaunay edges=${d} (grey) witness edges inside delaunay=${inside}/${w}`;
}

function curves() {
  const alpha = Number($("alpha").value);
  const tau = Number($("tau").value);
  const n = 200;
  const ys = habituation_curves(alpha, tau, 10 * tau, n);
  const ctx = $("hcanvas").getContext("2d");
  const [w, h] = [$("hcanvas").width, $("hcanvas").height];
  ctx.clearRect(0, 0, w, h);
  const lo = Math.min(0, ...ys);
  const plot = (off, color) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    for (let i = 0; i < n; i++) {
      const x = 10 + (i / (n - 1)) * (w - 20);
      const y = h - 10 - ((ys[off + i] - lo) / (1 - lo)) * (h - 20);
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    }
    ctx.stroke();
  };
  plot(0, "#c22");
  plot(n, "#26c");
  ctx.fillStyle = "#222";
  ctx.fillText("habituation (red), recovery (blue), t in [0, 10 tau]", 12, 14);
}

await init();
$("start").onclick = start;
$("pause").onclick = () => {
  running = !running;
  if (running) requestAnimationFrame(tick);
};
$("witness").onclick = witness;
$("curves").onclick = curves;
$("shape").onchange = () => {
  demo = null;
  running = false;
  drawNetwork();
};
curves();
drawNetwork();

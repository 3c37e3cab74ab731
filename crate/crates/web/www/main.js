import init, { tauCurve, constantCurve, constantCase, stationaryCurve } from "./pkg/nullflow_web.js";

const $ = (id) => document.getElementById(id);

function say(id, text, bad = false) {
  const el = $(id);
  el.textContent = text;
  el.className = bad ? "err" : "note";
}

function plotTau(canvas, data) {
  const g = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  g.clearRect(0, 0, w, h);
  const hs = [], ts = [];
  for (let i = 0; i < data.length; i += 2) { hs.push(data[i]); ts.push(data[i + 1]); }
  const x0 = hs[0], x1 = hs[hs.length - 1];
  const lim = 3;
  const px = (x) => pad + (w - 2 * pad) * (x - x0) / (x1 - x0);
  const py = (y) => h / 2 - (h / 2 - pad) * Math.max(-lim, Math.min(lim, y)) / lim;

  g.fillStyle = "#eef4ff";
  g.fillRect(pad, py(1), w - 2 * pad, py(-1) - py(1));
  g.strokeStyle = "#999";
  g.beginPath();
  g.moveTo(pad, py(0)); g.lineTo(w - pad, py(0));
  g.stroke();
  g.fillStyle = "#555";
  g.fillText("+1", 4, py(1) + 4);
  g.fillText("-1", 4, py(-1) + 4);
  g.fillText(x0.toFixed(1), pad, h - 8);
  g.fillText(x1.toFixed(1), w - pad - 20, h - 8);

  g.strokeStyle = "#c33";
  g.lineWidth = 1.5;
  g.beginPath();
  hs.forEach((x, i) => (i ? g.lineTo(px(x), py(ts[i])) : g.moveTo(px(x), py(ts[i]))));
  g.stroke();
}

// torical points, rotated about the x axis by `tilt` and the z axis by `turn`
function plotTorus(canvas, pts, turn) {
  const g = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, scale = h / 7.5;
  g.clearRect(0, 0, w, h);
  const a = turn * Math.PI / 180, tilt = 1.0;
  const proj = (x, y, z) => {
    const xr = x * Math.cos(a) - y * Math.sin(a);
    const yr = x * Math.sin(a) + y * Math.cos(a);
    const yt = yr * Math.cos(tilt) - z * Math.sin(tilt);
    return [w / 2 + scale * xr, h / 2 + scale * yt];
  };
  g.strokeStyle = "#ccc";
  for (const r of [1, 3]) {
    g.beginPath();
    for (let k = 0; k <= 96; k++) {
      const t = 2 * Math.PI * k / 96;
      const [u, v] = proj(r * Math.cos(t), r * Math.sin(t), 0);
      k ? g.lineTo(u, v) : g.moveTo(u, v);
    }
    g.stroke();
  }
  g.strokeStyle = "#1a5";
  g.lineWidth = 1.2;
  g.beginPath();
  for (let i = 0; i < pts.length; i += 3) {
    const [u, v] = proj(pts[i], pts[i + 1], pts[i + 2]);
    i ? g.lineTo(u, v) : g.moveTo(u, v);
  }
  g.stroke();
}

function drawTau() {
  try {
    const mu = +$("tau-mu").value, hmax = +$("tau-hmax").value;
    plotTau($("tau-canvas"), tauCurve(mu, 0, hmax, 600));
    say("tau-msg", "shaded band: |tau| <= 1, the stability bands");
  } catch (e) {
    say("tau-msg", String(e), true);
  }
}

function drawConstant() {
  try {
    const k = +$("const-kappa").value, span = +$("const-span").value;
    plotTorus($("const-canvas"), constantCurve(k, span, 4000), +$("const-turn").value);
    say("const-msg", constantCase(k));
  } catch (e) {
    say("const-msg", String(e), true);
  }
}

let stationary = null;

function buildStationary() {
  try {
    const [p, q] = $("stat-q").value.split("/").map((s) => parseInt(s, 10));
    const out = stationaryCurve(+$("stat-mu").value, p, q || 1, +$("stat-periods").value, 3000);
    stationary = out.subarray(3);
    say("stat-msg", `h+ = ${out[0].toFixed(6)}, h- = ${out[1].toFixed(6)}, period ${out[2].toFixed(6)}`);
    drawStationary();
  } catch (e) {
    stationary = null;
    say("stat-msg", String(e), true);
  }
}

function drawStationary() {
  if (stationary) plotTorus($("stat-canvas"), stationary, +$("stat-turn").value);
}

await init();
$("tau-go").onclick = drawTau;
for (const id of ["const-kappa", "const-span", "const-turn"]) $(id).oninput = drawConstant;
$("stat-go").onclick = buildStationary;
$("stat-turn").oninput = drawStationary;
drawTau();
drawConstant();
buildStationary();

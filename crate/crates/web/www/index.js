import init, { runCase, triangleFluxes, entropyStep } from "./pkg/conserva_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (v) => (Math.abs(v) < 1e-3 && v !== 0 ? v.toExponential(3) : v.toFixed(5));

function bounds(arrays) {
  let lo = Infinity, hi = -Infinity;
  for (const a of arrays) for (const v of a) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (lo === hi) { lo -= 1; hi += 1; }
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

function plot(canvas, xs, series, title) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const [x0, x1] = bounds([xs]);
  const [y0, y1] = bounds(series.map((s) => s.data));
  const px = (x) => 40 + ((x - x0) / (x1 - x0)) * (w - 50);
  const py = (y) => h - 25 - ((y - y0) / (y1 - y0)) * (h - 45);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40, 20, w - 50, h - 45);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(title, 45, 14);
  ctx.fillText(y1.toPrecision(4), 2, 26);
  ctx.fillText(y0.toPrecision(4), 2, h - 27);
  ctx.fillText(x0.toPrecision(3), 40, h - 8);
  ctx.fillText(x1.toPrecision(3), w - 40, h - 8);
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - 150, 34 + 13 * k);
    if (s.dots) {
      s.data.forEach((y, i) => ctx.fillRect(px(xs[i]) - 1.5, py(y) - 1.5, 3, 3));
      return;
    }
    ctx.beginPath();
    s.data.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
  });
}

function doRun() {
  const info = $("run-info");
  info.classList.remove("err");
  try {
    const cfl = $("cfl").value === "" ? undefined : Number($("cfl").value);
    const t0 = performance.now();
    const r = runCase($("case").value, $("scheme").value, Number($("nx").value), cfl, $("detector").checked);
    const ms = performance.now() - t0;
    const series = [{ data: r.values, color: "#c33", label: "computed", dots: true }];
    if (r.exact.length) series.unshift({ data: r.exact, color: "#36c", label: "exact" });
    plot($("profile"), r.x, series, r.component);
    const mass = r.mass, times = r.times;
    const drift = mass.map((m) => m - mass[0]);
    plot($("ledger"), times, [{ data: r.entropy, color: "#393", label: "total entropy" }], "entropy vs time");
    const maxDrift = drift.reduce((a, d) => Math.max(a, Math.abs(d)), 0);
    info.textContent = `${r.steps} steps in ${ms.toFixed(0)} ms\nmax |mass - mass(0)| = ${maxDrift.toExponential(3)}`;
  } catch (e) {
    info.classList.add("err");
    info.textContent = String(e.message ?? e);
  }
}

const tri = { pts: [[0.1, 0.15], [0.9, 0.3], [0.35, 0.9]], drag: -1 };

function drawTriangle() {
  const c = $("triangle"), ctx = c.getContext("2d");
  const { width: w, height: h } = c;
  const P = (p) => [p[0] * w, h - p[1] * h];
  ctx.clearRect(0, 0, w, h);
  const states = [Number($("s0").value), Number($("s1").value), Number($("s2").value)];
  const info = $("tri-info");
  info.classList.remove("err");
  let out;
  try {
    out = triangleFluxes(tri.pts.flat(), states, $("planar").value);
  } catch (e) {
    info.classList.add("err");
    info.textContent = String(e.message ?? e);
  }
  ctx.strokeStyle = "#333";
  ctx.beginPath();
  tri.pts.forEach((p, i) => (i ? ctx.lineTo(...P(p)) : ctx.moveTo(...P(p))));
  ctx.closePath();
  ctx.stroke();
  const g = [0, 1].map((k) => (tri.pts[0][k] + tri.pts[1][k] + tri.pts[2][k]) / 3);
  ctx.strokeStyle = "#aaa";
  ctx.setLineDash([4, 3]);
  for (const [a, b] of [[0, 1], [1, 2], [2, 0]]) {
    const m = [0, 1].map((k) => (tri.pts[a][k] + tri.pts[b][k]) / 2);
    ctx.beginPath();
    ctx.moveTo(...P(m));
    ctx.lineTo(...P(g));
    ctx.stroke();
  }
  ctx.setLineDash([]);
  tri.pts.forEach((p, i) => {
    ctx.fillStyle = "#c33";
    ctx.beginPath();
    ctx.arc(...P(p), 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#222";
    ctx.fillText(`${i}: u=${states[i]}`, P(p)[0] + 8, P(p)[1] - 8);
  });
  if (!out) return;
  const edges = ["0->1", "1->2", "2->0"];
  const lines = ["dof  residual"];
  for (let i = 0; i < 3; i++) lines.push(`${i}    ${fmt(out[i])}`);
  lines.push("", "edge  recovered   rusanov");
  for (let i = 0; i < 3; i++) lines.push(`${edges[i]}  ${fmt(out[3 + i])}  ${fmt(out[6 + i])}`);
  lines.push("", `rusanov - recovered = ${fmt(out[9])} on every edge`, `(spread ${out[10].toExponential(2)})`);
  info.textContent = lines.join("\n");
}

function hookTriangle() {
  const c = $("triangle");
  const at = (ev) => {
    const r = c.getBoundingClientRect();
    return [(ev.clientX - r.left) / c.width, 1 - (ev.clientY - r.top) / c.height];
  };
  c.addEventListener("mousedown", (ev) => {
    const q = at(ev);
    tri.drag = tri.pts.findIndex((p) => Math.hypot(p[0] - q[0], p[1] - q[1]) < 0.04);
  });
  c.addEventListener("mousemove", (ev) => {
    if (tri.drag < 0) return;
    tri.pts[tri.drag] = at(ev);
    drawTriangle();
  });
  window.addEventListener("mouseup", () => (tri.drag = -1));
  for (const id of ["s0", "s1", "s2", "planar"]) $(id).addEventListener("input", drawTriangle);
}

function drawEntropy() {
  const ul = Number($("ul").value), ur = Number($("ur").value);
  const [pl, pr, cl, cr, alpha, pre, post] = entropyStep(ul, ur);
  const c = $("bars"), ctx = c.getContext("2d");
  const { width: w, height: h } = c;
  ctx.clearRect(0, 0, w, h);
  const vals = [pl, cl, pr, cr];
  const top = Math.max(1e-9, ...vals.map(Math.abs));
  const mid = h / 2;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, mid);
  ctx.lineTo(w, mid);
  ctx.stroke();
  const labels = ["left", "left corr.", "right", "right corr."];
  vals.forEach((v, i) => {
    const x = 30 + i * 95, bh = (v / top) * (h / 2 - 20);
    ctx.fillStyle = i % 2 ? "#c33" : "#36c";
    ctx.fillRect(x, mid - Math.max(bh, 0), 50, Math.abs(bh));
    ctx.fillStyle = "#222";
    ctx.fillText(labels[i], x, h - 4);
  });
  $("ent-info").textContent = [
    `residuals     ${fmt(pl)}  ${fmt(pr)}`,
    `corrected     ${fmt(cl)}  ${fmt(cr)}`,
    `alpha         ${fmt(alpha)}`,
    `margin before ${fmt(pre)}`,
    `margin after  ${fmt(post)}`,
  ].join("\n");
}

await init();
$("run").addEventListener("click", doRun);
hookTriangle();
$("ul").addEventListener("input", drawEntropy);
$("ur").addEventListener("input", drawEntropy);
doRun();
drawTriangle();
drawEntropy();

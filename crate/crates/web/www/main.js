import init, { solve, indicial, sample_curve } from "./pkg/expsum_ode_web.js";

const term = (freq, coef) => ({ freq, coef });
const EXAMPLES = {
  "f'' + e^(-z) f' - f = 0": { order: 2, coefficients: [[term("0", "-1")], [term("-1", "1")]] },
  "third order, rational roots": {
    order: 3,
    coefficients: [
      [term("0", "16/27"), term("1", "-1")],
      [term("0", "-4/3"), term("1", "-2")],
      [term("1", "3")],
    ],
  },
  "third order, Gaussian roots": {
    order: 3,
    coefficients: [
      [term("0", "1"), term("1", "1i")],
      [term("0", "1"), term("1", "1+1i")],
      [term("0", "1"), term("1", "1")],
    ],
  },
  "triple root": {
    order: 3,
    coefficients: [
      [term("0", "-1"), term("1", "-1")],
      [term("0", "3"), term("1", "2")],
      [term("0", "-3"), term("1", "-1")],
    ],
  },
  "no solutions": { order: 2, coefficients: [[term("1", "1")], [term("0", "1")]] },
  "irrational roots: f'' - 2f = 0": { order: 2, coefficients: [[term("0", "-2")], []] },
};

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
let lastSolution = null;

function axes(ctx, w, h, xr, yr) {
  const sx = (x) => ((x - xr[0]) / (xr[1] - xr[0])) * w;
  const sy = (y) => h - ((y - yr[0]) / (yr[1] - yr[0])) * h;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(sx(xr[0]), sy(0));
  ctx.lineTo(sx(xr[1]), sy(0));
  ctx.moveTo(sx(0), sy(yr[0]));
  ctx.lineTo(sx(0), sy(yr[1]));
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.font = "11px sans-serif";
  ctx.fillText(`[${xr[0].toFixed(2)}, ${xr[1].toFixed(2)}] × [${yr[0].toFixed(2)}, ${yr[1].toFixed(2)}]`, 4, 12);
  return [sx, sy];
}

function padded(lo, hi) {
  const span = Math.max(hi - lo, 1);
  return [lo - 0.15 * span, hi + 0.15 * span];
}

function plotRoots(data) {
  const c = $("roots");
  const ctx = c.getContext("2d");
  const re = data.points.map((p) => p.re).concat([0]);
  const im = data.points.map((p) => p.im).concat([0]);
  const [sx, sy] = axes(ctx, c.width, c.height, padded(Math.min(...re), Math.max(...re)), padded(Math.min(...im), Math.max(...im)));
  for (const p of data.points) {
    ctx.fillStyle = COLORS[p.class % COLORS.length];
    ctx.beginPath();
    ctx.arc(sx(p.re), sy(p.im), 4 + 2 * p.multiplicity, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#000";
    ctx.fillText(p.multiplicity > 1 ? `${p.label} (×${p.multiplicity})` : p.label, sx(p.re) + 10, sy(p.im) - 6);
  }
}

function plotCurves() {
  const c = $("curves");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  if (!lastSolution || JSON.parse(lastSolution).basis.length === 0) return;
  const data = JSON.parse(sample_curve(lastSolution, +$("x0").value, +$("x1").value, 200));
  const ys = data.curves.flatMap((cv) => cv.re.concat(cv.im)).filter((v) => v !== null);
  const lim = Math.min(Math.max(...ys.map(Math.abs), 1), 1e6);
  const [sx, sy] = axes(ctx, c.width, c.height, [data.x[0], data.x[data.x.length - 1]], [-lim, lim]);
  data.curves.forEach((cv, k) => {
    for (const [part, dash] of [[cv.re, []], [cv.im, [4, 3]]]) {
      if (part.every((v) => v === null || Math.abs(v) < 1e-14)) continue;
      ctx.strokeStyle = COLORS[k % COLORS.length];
      ctx.setLineDash(dash);
      ctx.beginPath();
      let pen = false;
      part.forEach((v, i) => {
        if (v === null) { pen = false; return; }
        pen ? ctx.lineTo(sx(data.x[i]), sy(v)) : ctx.moveTo(sx(data.x[i]), sy(v));
        pen = true;
      });
      ctx.stroke();
    }
    ctx.setLineDash([]);
    ctx.fillStyle = COLORS[k % COLORS.length];
    ctx.fillText(`f${k + 1} = ${cv.label}`, 4, 28 + 14 * k);
  });
}

function run() {
  const out = $("result");
  out.className = "";
  lastSolution = null;
  try {
    const problem = $("problem").value;
    plotRoots(JSON.parse(indicial(problem)));
    lastSolution = solve(problem, $("numeric").checked);
    const doc = JSON.parse(lastSolution);
    const m = doc.metadata;
    const lines = [`mode: ${m.mode}`, `indicial polynomial: ${m.indicial}`];
    if (doc.basis.length === 0) lines.push("no finite-order solutions");
    doc.basis.forEach((b, k) => lines.push(`f${k + 1} = ${b.display}   ${b.verification.verified ? "verified" : "FAILED"}`));
    lines.push(`rank ${m.rank}, at most ${m.count_bound}`, ...m.notes.map((n) => `note: ${n}`));
    out.textContent = lines.join("\n");
  } catch (e) {
    out.className = "error";
    out.textContent = String(e.message ?? e);
  }
  plotCurves();
}

await init();
for (const name of Object.keys(EXAMPLES)) $("example").add(new Option(name, name));
const load = () => { $("problem").value = JSON.stringify(EXAMPLES[$("example").value], null, 2); run(); };
$("example").addEventListener("change", load);
$("solve").addEventListener("click", run);
$("x0").addEventListener("change", plotCurves);
$("x1").addEventListener("change", plotCurves);
load();

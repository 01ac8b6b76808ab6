import init, { runCurves, planPreview, inspectTree } from "./pkg/cofit_web.js";

const STRATEGIES = ["standard", "standard-roulette", "novel2", "noveln", "hybrid2", "hybridn"];
const COLORS = ["#333", "#999", "#d62728", "#ff7f0e", "#1f77b4", "#2ca02c"];

function fields(id) {
  const out = {};
  for (const el of document.querySelectorAll(`#${id} [name]`)) {
    out[el.name] = el.type === "number" ? Number(el.value) : el.value;
  }
  return out;
}

function showError(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  target.appendChild(p);
}

function drawCurves(report) {
  const canvas = document.getElementById("plot");
  const ctx = canvas.getContext("2d");
  const pad = { l: 50, r: 130, t: 10, b: 30 };
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  let lo = Infinity, hi = -Infinity;
  for (const c of report.curves) {
    lo = Math.min(lo, ...c.ci_low);
    hi = Math.max(hi, ...c.ci_high);
  }
  lo = Math.max(0, lo - 0.01);
  hi = Math.min(1, hi + 0.01);
  const iters = report.curves[0].mean.length;
  const x = (i) => pad.l + (iters === 1 ? w / 2 : (i / (iters - 1)) * w);
  const y = (v) => pad.t + h - ((v - lo) / (hi - lo || 1)) * h;

  ctx.strokeStyle = "#ccc";
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  for (let k = 0; k <= 4; k++) {
    const v = lo + ((hi - lo) * k) / 4;
    ctx.beginPath();
    ctx.moveTo(pad.l, y(v));
    ctx.lineTo(pad.l + w, y(v));
    ctx.stroke();
    ctx.fillText(v.toFixed(3), 4, y(v) + 4);
  }
  ctx.fillText("iteration", pad.l + w / 2 - 20, canvas.height - 8);

  report.curves.forEach((c, n) => {
    const color = COLORS[STRATEGIES.indexOf(c.strategy)];
    ctx.globalAlpha = 0.15;
    ctx.fillStyle = color;
    ctx.beginPath();
    c.ci_high.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    for (let i = iters - 1; i >= 0; i--) ctx.lineTo(x(i), y(c.ci_low[i]));
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    c.mean.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
    ctx.lineWidth = 1;
    ctx.fillText(`${c.strategy} ${c.mean[iters - 1].toFixed(3)}`, pad.l + w + 8, pad.t + 14 + n * 16);
  });
}

function onCurves() {
  const out = document.getElementById("verdicts");
  const params = fields("curves");
  params.strategies = STRATEGIES.filter((s) => document.getElementById(`cb-${s}`).checked);
  try {
    const report = JSON.parse(runCurves(JSON.stringify(params)));
    drawCurves(report);
    out.innerHTML = report.verdicts.length ? "<p>Final iteration vs standard (Welch test):</p>" : "";
    const table = document.createElement("table");
    for (const v of report.verdicts) {
      const row = table.insertRow();
      row.insertCell().textContent = v.strategy;
      row.insertCell().textContent = v.label;
      row.insertCell().textContent = `delta ${v.mean_delta >= 0 ? "+" : ""}${v.mean_delta.toFixed(4)}`;
      row.insertCell().textContent = `p = ${v.p_value.toExponential(2)}`;
    }
    out.appendChild(table);
  } catch (e) {
    showError(out, e);
  }
}

function onPlan() {
  const out = document.getElementById("plan-out");
  try {
    const r = JSON.parse(planPreview(JSON.stringify(fields("plan"))));
    out.innerHTML = "";
    const summary = document.createElement("p");
    summary.textContent = `quota K = ${r.quota}; ${r.pairs.length} pairs cover ${r.recombined.length} individuals`;
    out.appendChild(summary);
    const table = document.createElement("table");
    const head = table.createTHead().insertRow();
    for (const h of ["pair", "co-fitness", "parent A", "parent B"]) head.insertCell().textContent = h;
    r.pairs.forEach((p, n) => {
      const row = table.insertRow();
      row.insertCell().textContent = `${n + 1}: (${p.i}, ${p.j})`;
      row.insertCell().textContent = p.co_fitness === null ? "-" : String(+p.co_fitness.toFixed(4));
      for (const idx of [p.i, p.j]) {
        const m = r.population[idx];
        row.insertCell().textContent = `${m.fitness.toFixed(3)}  ${m.tree}`;
      }
    });
    out.appendChild(table);
  } catch (e) {
    showError(out, e);
  }
}

function onTree() {
  const out = document.getElementById("tree-out");
  try {
    const r = JSON.parse(inspectTree(JSON.stringify(fields("tree"))));
    out.textContent =
      `target     ${r.target}\n` +
      `tree       ${r.tree}\n` +
      `accuracy   ${r.accuracy.toFixed(4)}\n` +
      `left side  ${r.left_accuracy.toFixed(4)}\n` +
      `right side ${r.right_accuracy.toFixed(4)}`;
  } catch (e) {
    out.textContent = String(e.message ?? e);
  }
}

await init();

const boxes = document.getElementById("strategy-boxes");
const select = document.querySelector("#plan select[name=strategy]");
for (const s of STRATEGIES) {
  const label = document.createElement("label");
  label.innerHTML = `<input type="checkbox" id="cb-${s}"> ${s}`;
  boxes.appendChild(label);
  select.add(new Option(s, s));
}
for (const s of ["standard", "hybrid2", "hybridn"]) document.getElementById(`cb-${s}`).checked = true;
select.value = "hybrid2";

document.getElementById("run-curves").addEventListener("click", onCurves);
document.getElementById("run-plan").addEventListener("click", onPlan);
document.getElementById("run-tree").addEventListener("click", onTree);
onCurves();

// Demo page glue: loads the wasm module and wires three explorable plots.
// No framework, no build step beyond wasm-bindgen's generated pkg/.

import init, {
  ga_bifurcation,
  br_asymmetry_bifurcation,
  pr_share_trace,
  pr_equilibrium_shares,
  normalized_rates,
  griefing_curve,
  breakeven_delta_frac,
} from "./pkg/mineq_wasm.js";

const COLORS = ["#58a6ff", "#ff7b72", "#56d364", "#d2a8ff"];

function plotArea(canvas) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pad = { left: 52, right: 14, top: 14, bottom: 34 };
  return { ctx, w, h, pad };
}

function axes(area, xMin, xMax, yMin, yMax, xLabel, yLabel) {
  const { ctx, w, h, pad } = area;
  const sx = (x) => pad.left + ((x - xMin) / (xMax - xMin)) * (w - pad.left - pad.right);
  const sy = (y) => h - pad.bottom - ((y - yMin) / (yMax - yMin)) * (h - pad.top - pad.bottom);
  ctx.strokeStyle = "#39434f";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad.left, pad.top, w - pad.left - pad.right, h - pad.top - pad.bottom);
  ctx.fillStyle = "#8b95a5";
  ctx.font = "20px system-ui";
  ctx.textAlign = "center";
  ctx.fillText(xLabel, (pad.left + w - pad.right) / 2, h - 8);
  ctx.save();
  ctx.translate(16, (pad.top + h - pad.bottom) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
  ctx.textAlign = "right";
  ctx.font = "16px system-ui";
  for (const frac of [0, 0.5, 1]) {
    const y = yMin + frac * (yMax - yMin);
    ctx.fillText(y.toPrecision(3), pad.left - 6, sy(y) + 5);
    const x = xMin + frac * (xMax - xMin);
    ctx.textAlign = "center";
    ctx.fillText(x.toPrecision(3), sx(x), h - pad.bottom + 20);
    ctx.textAlign = "right";
  }
  return { sx, sy };
}

function drawBifurcation() {
  const rule = document.getElementById("bifRule").value;
  const n = Number(document.getElementById("bifN").value);
  const max = Number(document.getElementById("bifMax").value);
  const min = rule === "ga" ? 0.01 : 1.0;
  const pairs =
    rule === "ga"
      ? ga_bifurcation(n, min, Math.max(max, min + 0.05), 220, 160, 2000)
      : br_asymmetry_bifurcation(n, min, Math.max(max, min + 0.05), 220, 160, 2000);
  let yMax = 0;
  for (let i = 1; i < pairs.length; i += 2) yMax = Math.max(yMax, pairs[i]);
  const canvas = document.getElementById("bifCanvas");
  const area = plotArea(canvas);
  const { sx, sy } = axes(
    area, min, Math.max(max, min + 0.05), 0, yMax * 1.05 || 1,
    rule === "ga" ? "step size θ" : "cost ratio r",
    "aggregate X"
  );
  area.ctx.fillStyle = "rgba(88, 166, 255, 0.45)";
  for (let i = 0; i < pairs.length; i += 2) {
    area.ctx.fillRect(sx(pairs[i]), sy(pairs[i + 1]), 1.4, 1.4);
  }
}

function drawPr() {
  const rho = Number(document.getElementById("prRho").value);
  document.getElementById("prRhoOut").value = rho.toFixed(2);
  const rates = [0, 1, 2, 3].map((k) => {
    const v = Number(document.getElementById(`r${k}`).value);
    document.getElementById(`r${k}Out`).value = v.toFixed(2);
    return v;
  });
  const iterations = 60;
  const trace = pr_share_trace(rates, rho, iterations);
  const finals = pr_equilibrium_shares(rates, rho);
  const targets = normalized_rates(rates);
  const canvas = document.getElementById("prCanvas");
  const area = plotArea(canvas);
  const { sx, sy } = axes(area, 0, iterations, 0, 1, "iteration", "spending share");
  const m = rates.length;
  for (let k = 0; k < m; k++) {
    area.ctx.strokeStyle = COLORS[k];
    area.ctx.lineWidth = 2;
    area.ctx.beginPath();
    for (let t = 0; t <= iterations; t++) {
      const share = trace[t * m + k];
      if (t === 0) area.ctx.moveTo(sx(t), sy(share));
      else area.ctx.lineTo(sx(t), sy(share));
    }
    area.ctx.stroke();
  }
  // Final shares (solid) vs normalized rates (outline) as side bars.
  const barW = 14;
  for (let k = 0; k < m; k++) {
    const x = area.w - area.pad.right - (m - k) * (barW + 8) - 4;
    area.ctx.fillStyle = COLORS[k];
    area.ctx.globalAlpha = 0.8;
    area.ctx.fillRect(x, sy(finals[k]), barW, sy(0) - sy(finals[k]));
    area.ctx.globalAlpha = 1;
    area.ctx.strokeStyle = "#e6e9ee";
    area.ctx.strokeRect(x, sy(targets[k]), barW, sy(0) - sy(targets[k]));
  }
}

function drawGf() {
  const n = Number(document.getElementById("gfN").value);
  document.getElementById("gfNOut").value = n;
  const pairs = griefing_curve(n, 1.0, 0.02, 4.0, 300);
  const breakeven = breakeven_delta_frac(n, 1.0);
  const canvas = document.getElementById("gfCanvas");
  const area = plotArea(canvas);
  let yMax = 0;
  for (let i = 1; i < pairs.length; i += 2) yMax = Math.max(yMax, pairs[i]);
  const { sx, sy } = axes(
    area, 0, 4, 0, Math.min(yMax, 12), "deviation Δ (fractions of X*)", "griefing factor"
  );
  area.ctx.strokeStyle = COLORS[0];
  area.ctx.lineWidth = 2;
  area.ctx.beginPath();
  let started = false;
  for (let i = 0; i < pairs.length; i += 2) {
    const y = Math.min(pairs[i + 1], 12);
    if (!started) { area.ctx.moveTo(sx(pairs[i]), sy(y)); started = true; }
    else area.ctx.lineTo(sx(pairs[i]), sy(y));
  }
  area.ctx.stroke();
  // GF = 1 reference.
  area.ctx.strokeStyle = "#8b95a5";
  area.ctx.setLineDash([6, 5]);
  area.ctx.beginPath();
  area.ctx.moveTo(sx(0), sy(1));
  area.ctx.lineTo(sx(4), sy(1));
  area.ctx.stroke();
  area.ctx.setLineDash([]);
  // Break-even marker on the curve: GF = v/(c* delta) = 1/frac when the
  // deviation is frac of the equilibrium aggregate X* = v/c*.
  if (breakeven <= 4) {
    const gfAt = 1 / breakeven;
    area.ctx.fillStyle = COLORS[1];
    area.ctx.beginPath();
    area.ctx.arc(sx(breakeven), sy(Math.min(gfAt, 12)), 5, 0, 2 * Math.PI);
    area.ctx.fill();
  }
}

async function main() {
  await init();
  document.getElementById("loading").hidden = true;
  document.getElementById("app").hidden = false;

  document.getElementById("bifRun").addEventListener("click", drawBifurcation);
  document.getElementById("bifRule").addEventListener("change", () => {
    const ga = document.getElementById("bifRule").value === "ga";
    const slider = document.getElementById("bifMax");
    slider.min = ga ? "0.2" : "2";
    slider.max = ga ? "2" : "12";
    slider.value = ga ? "1.0" : "8";
    document.getElementById("bifMaxOut").value = slider.value;
    drawBifurcation();
  });
  document.getElementById("bifN").addEventListener("change", drawBifurcation);
  document.getElementById("bifMax").addEventListener("input", () => {
    document.getElementById("bifMaxOut").value = document.getElementById("bifMax").value;
  });
  document.getElementById("bifMax").addEventListener("change", drawBifurcation);

  for (const id of ["prRho", "r0", "r1", "r2", "r3"]) {
    document.getElementById(id).addEventListener("input", drawPr);
  }
  document.getElementById("gfN").addEventListener("input", drawGf);

  drawBifurcation();
  drawPr();
  drawGf();
}

main();

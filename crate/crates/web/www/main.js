import init, { histogram, trace, coalescence } from "./pkg/lexsamp_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function guard(f) {
  return () => {
    $("status").textContent = "";
    $("status").className = "";
    try {
      f();
    } catch (e) {
      $("status").textContent = String(e);
      $("status").className = "err";
    }
  };
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

function drawHistogram(r) {
  const c = $("hist"), ctx = c.getContext("2d");
  const pad = 40, w = c.width, h = c.height;
  axes(ctx, w, h, pad);
  const k = r.frequencies.length;
  const expected = r.report.expected[0];
  const top = Math.max(expected * 1.6, ...r.frequencies);
  const y = (f) => h - pad - (f / top) * (h - 1.5 * pad);
  const bw = (w - 1.5 * pad) / k;
  ctx.fillStyle = "#4a7fb5";
  r.frequencies.forEach((f, i) => ctx.fillRect(pad + i * bw + 1, y(f), Math.max(bw - 2, 1), h - pad - y(f)));
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  ctx.moveTo(pad, y(expected));
  ctx.lineTo(w - pad / 2, y(expected));
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(top.toFixed(3), 2, pad / 2 + 8);
  ctx.fillText("0", pad - 12, h - pad);
}

function runHistogram() {
  const r = JSON.parse(histogram($("poset").value, num("samples"), num("seed")));
  drawHistogram(r);
  const rows = r.report.labels.map((l, i) =>
    `${l.join(" ").padEnd(2 * l.length + 2)}${String(r.report.observed[i]).padStart(8)}  ${r.frequencies[i].toFixed(4)}`);
  if (rows.length > 40) rows.splice(20, rows.length - 40, "...");
  $("hist-out").textContent =
    `${r.count} extensions, chi-square ${r.report.chi_square.toFixed(2)} on ${r.report.dof} dof, ` +
    `p = ${r.report.p_value.toFixed(4)} (${r.passed ? "consistent with uniform" : "rejected"})\n\n` + rows.join("\n");
}

function runTrace() {
  const r = JSON.parse(trace($("poset").value, num("seed"), num("sweeps")));
  const rows = r.states.map((s, i) =>
    `<tr><td>${i}</td>${s.map((x) => (x === null ? '<td class="star">*</td>' : `<td>${x}</td>`)).join("")}</tr>`);
  $("trace").innerHTML = `<table class="trace">${rows.join("")}</table>`;
  const last = r.states[r.states.length - 1];
  $("trace-out").textContent = r.coalesced
    ? `Coalesced after ${r.states.length - 1} sweeps on ${last.join(" ")}.`
    : `Not coalesced within ${r.states.length - 1} sweeps.`;
}

function drawCurve(r) {
  const c = $("curve"), ctx = c.getContext("2d");
  const pad = 40, w = c.width, h = c.height;
  axes(ctx, w, h, pad);
  const tMax = r.curve[r.curve.length - 1].t || 1;
  const x = (t) => pad + (t / tMax) * (w - 1.5 * pad);
  const y = (f) => h - pad - f * (h - 1.5 * pad);
  ctx.strokeStyle = "#4a7fb5";
  ctx.beginPath();
  r.curve.forEach((p, i) => (i ? ctx.lineTo(x(p.t), y(p.fraction)) : ctx.moveTo(x(p.t), y(p.fraction))));
  ctx.stroke();
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  ctx.moveTo(x(r.recommended_t), y(0));
  ctx.lineTo(x(r.recommended_t), y(1));
  ctx.moveTo(pad, y(0.5));
  ctx.lineTo(w - pad / 2, y(0.5));
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText("1", pad - 12, y(1) + 4);
  ctx.fillText(`t = ${tMax}`, w - pad * 1.5, h - pad + 14);
  ctx.fillText(`recommended t = ${r.recommended_t}`, x(r.recommended_t) + 4, y(1) + 12);
}

function runCurve() {
  const r = JSON.parse(coalescence(num("curve-n"), num("reps"), num("seed")));
  drawCurve(r);
  const at = r.curve.find((p) => p.t >= r.recommended_t);
  $("curve-out").textContent =
    `P(coalesced by t = ${at.t}) = ${at.fraction.toFixed(3)}\n` +
    `placeholder promotion time: mean ${r.tau.mean.toFixed(2)} ± ${r.tau.std_error.toFixed(2)}, ` +
    `bound ${r.tau.mean_bound.toFixed(1)}`;
}

await init();
$("run-hist").onclick = guard(runHistogram);
$("run-trace").onclick = guard(runTrace);
$("run-curve").onclick = guard(runCurve);
$("status").textContent = "ready";

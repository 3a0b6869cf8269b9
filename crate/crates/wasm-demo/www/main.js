import init, { meanCurve, cesaroAbelCurve, kernelRow } from "./pkg/ewens_wasm_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function columns(flat, width) {
  const cols = Array.from({ length: width }, () => []);
  for (let i = 0; i < flat.length; i += width) {
    for (let c = 0; c < width; c++) cols[c].push(flat[i + c]);
  }
  return cols;
}

function plot(section, x, series, { logX = false, logY = false } = {}) {
  const canvas = section.querySelector("canvas");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 50;
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? Math.log10 : (v) => v;
  const ys = series.flatMap((s) => s.values).filter((v) => Number.isFinite(ty(v)));
  const [x0, x1] = [tx(Math.min(...x)), tx(Math.max(...x))];
  let [y0, y1] = [Math.min(...ys.map(ty)), Math.max(...ys.map(ty))];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (v) => pad + ((tx(v) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (v) => h - pad - ((ty(v) - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  const fmt = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(y1, logY), 2, pad + 4);
  ctx.fillText(fmt(y0, logY), 2, h - pad);
  ctx.fillText(fmt(x0, logX), pad, h - pad + 16);
  ctx.fillText(fmt(x1, logX), w - pad - 30, h - pad + 16);

  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.beginPath();
    let started = false;
    s.values.forEach((v, i) => {
      if (!Number.isFinite(ty(v))) return;
      if (started) ctx.lineTo(px(x[i]), py(v));
      else { ctx.moveTo(px(x[i]), py(v)); started = true; }
    });
    ctx.stroke();
  });
  section.querySelector(".legend").innerHTML = series
    .map((s, k) => `<span style="color:${COLORS[k % COLORS.length]}">■ ${s.label}</span>`)
    .join("");
}

function wire(id, draw) {
  const section = document.getElementById(id);
  const form = section.querySelector("form");
  const error = section.querySelector(".error");
  const run = () => {
    const f = Object.fromEntries(new FormData(form));
    try {
      error.textContent = "";
      draw(section, f);
    } catch (e) {
      error.textContent = e.message ?? String(e);
    }
  };
  form.addEventListener("input", run);
  run();
}

await init();

wire("mean", (section, f) => {
  const [n, re, im, limRe, limIm] = columns(meanCurve(f.kind, f.param, +f.theta, +f.n), 5);
  plot(section, n, [
    { label: "Re M_n", values: re },
    { label: "Im M_n", values: im },
    { label: "Re limit", values: limRe },
    { label: "Im limit", values: limIm },
  ]);
});

wire("cesaro", (section, f) => {
  const [n, cRe, , aRe] = columns(cesaroAbelCurve(f.series, +f.ratio, +f.p, +f.n), 5);
  plot(section, n, [
    { label: "Cesàro", values: cRe },
    { label: "Abel", values: aRe },
  ], { logX: true });
});

wire("kernel", (section, f) => {
  const [m, c, asym, b] = columns(kernelRow(+f.theta, +f.j, +f.m), 4);
  plot(section, m, [
    { label: "c_{m,j}", values: c },
    { label: "asymptotic", values: asym },
    { label: "majorant b", values: b },
  ], { logY: true });
});

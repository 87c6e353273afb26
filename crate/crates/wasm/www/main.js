import init, { preset_names, wigner_map, quench_nbar, rabi_signal, ancilla_coupling } from "./pkg/rabi_spt_wasm.js";

const $ = (id) => document.getElementById(id);
const GRID = 41;
const N_FOCK = 30;
const HALF_WIDTH = 3.5;
const W_SCALE = 2 / Math.PI;

function colour(v) {
  const x = Math.max(-1, Math.min(1, v / W_SCALE));
  const a = Math.round(255 * (1 - Math.abs(x)));
  return x >= 0 ? [255, a, a] : [a, a, 255];
}

function drawMap(canvas, values) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(GRID, GRID);
  for (let j = 0; j < GRID; j++) {
    for (let i = 0; i < GRID; i++) {
      // Row j of the image is Im β decreasing downwards.
      const [r, g, b] = colour(values[(GRID - 1 - j) * GRID + i]);
      const p = 4 * (j * GRID + i);
      img.data.set([r, g, b, 255], p);
    }
  }
  const off = new OffscreenCanvas(GRID, GRID);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "rgba(0,0,0,0.25)";
  ctx.beginPath();
  ctx.moveTo(canvas.width / 2, 0); ctx.lineTo(canvas.width / 2, canvas.height);
  ctx.moveTo(0, canvas.height / 2); ctx.lineTo(canvas.width, canvas.height / 2);
  ctx.stroke();
}

function plot(canvas, xs, ys, { xLabel, yLabel, yMax, dots }) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 48, r: 10, t: 10, b: 34 };
  const xMax = Math.max(...xs) || 1;
  const top = yMax ?? Math.max(1e-9, ...ys) * 1.1;
  const X = (x) => pad.l + (x / xMax) * (w - pad.l - pad.r);
  const Y = (y) => h - pad.b - (y / top) * (h - pad.t - pad.b);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
  ctx.font = "11px system-ui";
  for (let k = 0; k <= 4; k++) {
    ctx.fillText((top * k / 4).toFixed(2), 4, Y(top * k / 4) + 4);
    ctx.fillText((xMax * k / 4).toFixed(2), X(xMax * k / 4) - 10, h - pad.b + 14);
  }
  ctx.fillText(xLabel, w / 2 - 20, h - 4);
  ctx.save(); ctx.translate(12, h / 2); ctx.rotate(-Math.PI / 2); ctx.fillText(yLabel, -20, 0); ctx.restore();
  ctx.strokeStyle = ctx.fillStyle = "#c33";
  if (dots) {
    xs.forEach((x, i) => ctx.fillRect(X(x) - 1.5, Y(ys[i]) - 1.5, 3, 3));
  } else {
    ctx.beginPath();
    xs.forEach((x, i) => (i ? ctx.lineTo(X(x), Y(ys[i])) : ctx.moveTo(X(x), Y(ys[i]))));
    ctx.stroke();
  }
}

function split(pairs) {
  const xs = [], ys = [];
  for (let i = 0; i < pairs.length; i += 2) { xs.push(pairs[i]); ys.push(pairs[i + 1]); }
  return [xs, ys];
}

function guarded(msgId, f) {
  const el = $(msgId);
  try {
    el.classList.remove("error");
    f(el);
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e.message ?? e);
  }
}

function updateWigner() {
  const xi = +$("xi").value, alpha = +$("alpha").value;
  $("xi-val").textContent = xi.toFixed(2);
  $("alpha-val").textContent = alpha.toFixed(2);
  guarded("wigner-msg", (el) => {
    const w = wigner_map($("preset").value, xi, alpha, N_FOCK, HALF_WIDTH, GRID);
    const n = GRID * GRID;
    drawMap($("w-ee"), w.subarray(0, n));
    drawMap($("w-gg"), w.subarray(n));
    el.textContent = `Left: W_gg, right: W_ee on Re β, Im β ∈ [−${HALF_WIDTH}, ${HALF_WIDTH}]; red positive, blue negative, scale ±2/π.`;
  });
}

function updateQuench() {
  $("xi-max-val").textContent = (+$("xi-max").value).toFixed(2);
  guarded("quench-msg", (el) => {
    const start = performance.now();
    const [t, nbar] = split(quench_nbar(+$("xi-max").value, +$("tphi").value, +$("nfock").value));
    plot($("quench"), t, nbar, { xLabel: "t (μs)", yLabel: "n̄" });
    el.textContent = `Final n̄ = ${nbar[nbar.length - 1].toFixed(3)} (${(performance.now() - start).toFixed(0)} ms).`;
  });
}

function updateSignal() {
  const alpha = +$("sig-alpha").value;
  $("sig-alpha-val").textContent = alpha.toFixed(2);
  guarded("signal-msg", (el) => {
    const shots = +$("shots").value;
    const [tau, pe] = split(rabi_signal(alpha, shots, +$("seed").value, 1.0, 251));
    plot($("signal"), tau, pe, { xLabel: "τ (μs)", yLabel: "P_e", yMax: 1, dots: shots > 0 });
    el.textContent = `Coherent field with n̄ = ${(alpha * alpha).toFixed(2)}; ancilla coupling ${ancilla_coupling().toFixed(2)} MHz.`;
  });
}

await init();
$("status").textContent = "";
for (const name of preset_names()) {
  $("preset").add(new Option(name, name, name === "ground", name === "ground"));
}
// Slider events arrive faster than a map can be evaluated; redraw at most
// once per animation frame.
let pending = false;
const scheduleWigner = () => {
  if (!pending) {
    pending = true;
    requestAnimationFrame(() => { pending = false; updateWigner(); });
  }
};
for (const id of ["preset", "xi", "alpha"]) $(id).addEventListener("input", scheduleWigner);
$("xi-max").addEventListener("input", () => ($("xi-max-val").textContent = (+$("xi-max").value).toFixed(2)));
$("run-quench").addEventListener("click", updateQuench);
for (const id of ["sig-alpha", "shots", "seed"]) $(id).addEventListener("input", updateSignal);
updateWigner();
updateQuench();
updateSignal();

import init, { kernel_curve, lobe_profile, render_preview } from "./pkg/lpv_web.js";

const $ = (id) => document.getElementById(id);

function plotKernel() {
  const lambda = Number($("lambda").value);
  $("lambda-out").textContent = lambda.toFixed(2);
  const v = kernel_curve(lambda, 200);
  const c = $("kernel"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  let top = 0;
  for (let i = 0; i < v.length; i += 3) top = Math.max(top, v[i + 1], v[i + 2]);
  const x = (t) => 30 + (t / Math.PI) * (c.width - 40);
  const y = (f) => c.height - 20 - (f / top) * (c.height - 30);
  g.strokeStyle = "#ccc";
  g.beginPath();
  g.moveTo(x(0), y(0)); g.lineTo(x(Math.PI), y(0));
  g.moveTo(x(0), y(0)); g.lineTo(x(0), y(top));
  g.stroke();
  g.fillStyle = "#666";
  g.fillText("0", x(0) - 4, c.height - 6);
  g.fillText("π", x(Math.PI) - 4, c.height - 6);
  g.fillText(top.toFixed(1), 2, y(top) + 4);
  for (const [k, color] of [[1, "#c33"], [2, "#36c"]]) {
    g.strokeStyle = color;
    g.beginPath();
    for (let i = 0; i < v.length; i += 3) g.lineTo(x(v[i]), y(v[i + k]));
    g.stroke();
  }
}

function plotLobe() {
  const c = $("lobe"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const axis = $("axis").value.split(",").map(Number);
  let v;
  try {
    if (axis.length !== 3) throw new Error("axis needs three components");
    v = lobe_profile($("lobe-basis").value, axis[0], axis[1], axis[2], 360);
  } catch (e) {
    g.fillText(String(e.message ?? e), 10, 20);
    return;
  }
  const cx = c.width / 2, cy = c.height / 2, r = c.width * 0.4;
  g.strokeStyle = "#eee";
  for (const s of [0.25, 0.5, 0.75, 1]) {
    g.beginPath(); g.arc(cx, cy, s * r, 0, 2 * Math.PI); g.stroke();
  }
  for (const [k, color] of [[1, "#999"], [2, "#c33"]]) {
    g.strokeStyle = color;
    g.beginPath();
    for (let i = 0; i <= v.length; i += 3) {
      const j = i % v.length;
      const m = Math.max(v[j + k], 0);
      g.lineTo(cx + r * m * Math.cos(v[j]), cy - r * m * Math.sin(v[j]));
    }
    g.stroke();
  }
}

function render() {
  $("status").textContent = "rendering...";
  // Let the status text paint before the blocking call.
  setTimeout(() => {
    const c = $("preview");
    const t0 = performance.now();
    try {
      const px = render_preview(
        $("render-basis").value,
        $("shadows").checked,
        Number($("iterations").value),
        Number($("cells").value),
        c.width,
        c.height,
      );
      c.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(px), c.width, c.height), 0, 0);
      $("status").textContent = `${(performance.now() - t0).toFixed(0)} ms`;
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  }, 20);
}

await init();
$("lambda").addEventListener("input", plotKernel);
$("lobe-basis").addEventListener("change", plotLobe);
$("axis").addEventListener("change", plotLobe);
$("render").addEventListener("click", render);
plotKernel();
plotLobe();

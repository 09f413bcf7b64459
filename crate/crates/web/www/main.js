import init, { free_energy_curve, phase_grid, gauge_spectrum } from "./pkg/zn_lab_web.js";

const $ = (id) => document.getElementById(id);

function drawCurve() {
  const beta = Math.pow(10, Number($("mft-beta").value));
  $("mft-beta-val").textContent = beta.toFixed(3);
  const ys = free_energy_curve(Number($("mft-d").value), beta, 0, 241);
  const c = $("mft-plot");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const lo = Math.min(...ys), hi = Math.max(...ys);
  const span = hi - lo || 1;
  g.beginPath();
  ys.forEach((y, i) => {
    const px = (i / (ys.length - 1)) * c.width;
    const py = c.height - 10 - ((y - lo) / span) * (c.height - 20);
    i === 0 ? g.moveTo(px, py) : g.lineTo(px, py);
  });
  g.stroke();
}

const colors = { H: "#3b6fb6", G: "#e08a2c", C: "#bbbbbb", "?": "#ff0000" };

function drawGrid() {
  $("pd-status").textContent = "computing...";
  setTimeout(() => {
    try {
      const n = Number($("pd-n").value);
      const rows = phase_grid($("pd-axes").value, n, n);
      const c = $("pd-plot");
      const g = c.getContext("2d");
      const w = c.width / n, h = c.height / rows.length;
      rows.forEach((row, i) => {
        [...row].forEach((ch, j) => {
          g.fillStyle = colors[ch];
          g.fillRect(j * w, c.height - (i + 1) * h, w, h);
        });
      });
      $("pd-status").textContent = "";
    } catch (e) {
      $("pd-status").textContent = String(e);
      $("pd-status").className = "err";
    }
  }, 10);
}

function runSpectrum() {
  try {
    const ev = gauge_spectrum(
      Number($("sp-n").value), Number($("sp-l").value),
      Number($("sp-l1").value), Number($("sp-l2").value), 12);
    $("sp-out").textContent = Array.from(ev, (e) => e.toFixed(10)).join("\n");
  } catch (e) {
    $("sp-out").textContent = String(e);
  }
}

await init();
$("mft-beta").addEventListener("input", drawCurve);
$("mft-d").addEventListener("change", drawCurve);
$("pd-run").addEventListener("click", drawGrid);
$("sp-run").addEventListener("click", runSpectrum);
drawCurve();

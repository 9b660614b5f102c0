import init, { runExperiment, evaluateGaps, checkLemmas } from "./pkg/ecfp_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function buildConfig() {
  const sizes = $("sizes").value.split(",").map((s) => parseInt(s.trim(), 10)).filter((x) => x > 0);
  const players = sizes.reduce((a, b) => a + b, 0);
  const kind = $("kind").value;
  const generator = {
    kind,
    players,
    actions: Array(players).fill(num("actions")),
    seed: num("game-seed"),
  };
  if (kind === "symmetric_classes") generator.class_sizes = sizes;
  const gamma = $("classical").checked
    ? { family: "classical" }
    : { family: "power", rho: num("rho"), t0: num("t0") };
  const scale = num("eps-scale");
  const epsilon = scale > 0
    ? { family: "power", scale, exponent: num("eps-exp") }
    : { family: "zero" };
  return {
    game: { generator },
    process: $("process").value,
    iterations: num("iterations"),
    initial_action: $("initial").value,
    schedules: { gamma, epsilon },
    selection: { mode: $("selection").value, seed: num("sel-seed") },
    euler: { h: num("euler-h") },
  };
}

const COLORS = { ne_gap: "#1f77b4", mce_gap: "#d62728", sne_gap: "#2ca02c" };

// Gaps on a log scale (clamped at 1e-8), U(qbar) on a linear right axis,
// time on a log axis.
function plot(records) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const pad = { l: 55, r: 55, t: 10, b: 30 };
  ctx.clearRect(0, 0, W, H);
  ctx.font = "11px sans-serif";
  if (records.length === 0) return;

  const tMax = Math.max(2, records[records.length - 1].t);
  const x = (t) => pad.l + (Math.log10(t) / Math.log10(tMax)) * (W - pad.l - pad.r);
  const floor = 1e-8;
  let gMax = floor * 10;
  for (const r of records) gMax = Math.max(gMax, r.ne_gap, r.mce_gap, r.sne_gap);
  const lo = Math.log10(floor), hi = Math.ceil(Math.log10(gMax));
  const y = (g) => {
    const v = Math.log10(Math.max(g, floor));
    return H - pad.b - ((v - lo) / (hi - lo)) * (H - pad.t - pad.b);
  };
  const ws = records.map((r) => r.lyapunov_w);
  let wLo = Math.min(...ws), wHi = Math.max(...ws);
  if (wHi - wLo < 1e-9) { wLo -= 0.5; wHi += 0.5; }
  const yw = (w) => H - pad.b - ((w - wLo) / (wHi - wLo)) * (H - pad.t - pad.b);

  ctx.strokeStyle = "#eee";
  ctx.fillStyle = "#555";
  for (let e = lo; e <= hi; e++) {
    ctx.beginPath(); ctx.moveTo(pad.l, y(10 ** e)); ctx.lineTo(W - pad.r, y(10 ** e)); ctx.stroke();
    ctx.fillText(`1e${e}`, 8, y(10 ** e) + 4);
  }
  for (let e = 0; 10 ** e <= tMax; e++) {
    ctx.beginPath(); ctx.moveTo(x(10 ** e), pad.t); ctx.lineTo(x(10 ** e), H - pad.b); ctx.stroke();
    ctx.fillText(`1e${e}`, x(10 ** e) - 8, H - 10);
  }
  ctx.fillText(wHi.toFixed(3), W - pad.r + 5, pad.t + 10);
  ctx.fillText(wLo.toFixed(3), W - pad.r + 5, H - pad.b);

  const line = (color, f) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    records.forEach((r, k) => {
      const px = x(Math.max(r.t, 1)), py = f(r);
      if (k === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
    });
    ctx.stroke();
  };
  line("#777", (r) => yw(r.lyapunov_w));
  for (const [key, color] of Object.entries(COLORS)) line(color, (r) => y(r[key]));
}

function show(id, f) {
  const out = $(id);
  out.classList.remove("error");
  try {
    out.textContent = f();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

async function main() {
  await init();

  $("run-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    $("run-status").textContent = "running...";
    // let the status repaint before the synchronous run
    setTimeout(() => {
      const started = performance.now();
      show("summary", () => {
        const res = JSON.parse(runExperiment(JSON.stringify(buildConfig())));
        plot(res.records);
        $("game-json").value = JSON.stringify(res.game);
        $("part-json").value = JSON.stringify({ classes: res.classes });
        const s = res.summary;
        return [
          `classes ${JSON.stringify(res.classes)}, ${res.records.length} rows, final t = ${s.final_t}`,
          ...["ne", "mce", "sne"].map((k) =>
            `${k.padEnd(4)} last ${s[k].last.toExponential(3)}  min ${s[k].min.toExponential(3)}  ` +
            `first <= ${s[k].threshold} at t = ${s[k].first_crossing ?? "never"}`),
          s.aborted ? `aborted: ${s.aborted}` : "",
        ].join("\n");
      });
      $("run-status").textContent = `${((performance.now() - started) / 1000).toFixed(2)} s`;
    }, 10);
  });

  $("gaps-btn").addEventListener("click", () =>
    show("gaps-out", () =>
      JSON.stringify(JSON.parse(evaluateGaps($("game-json").value, $("part-json").value, $("strat-json").value)), null, 2)));

  $("lemma-btn").addEventListener("click", () =>
    show("lemma-out", () => {
      const r = JSON.parse(checkLemmas($("game-json").value, $("part-json").value,
        num("lemma-trials"), num("lemma-steps"), num("lemma-seed")));
      return `${r.passed ? "PASS" : "FAIL"}\n${JSON.stringify(r.report, null, 2)}`;
    }));
}

main();

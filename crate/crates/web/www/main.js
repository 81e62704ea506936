import init, { densityCuts, clusterSequences, engagementDemo } from "./pkg/learntrace_web.js";

const $ = (id) => document.getElementById(id);

// Runs `op`, shows the JSON (minus the figure) and the figure.
function show(prefix, op) {
  const out = $(prefix + "-out");
  const fig = $(prefix + "-fig");
  try {
    const result = JSON.parse(op());
    fig.innerHTML = result.svg;
    delete result.svg;
    out.className = "";
    out.textContent = JSON.stringify(result, null, 2);
  } catch (e) {
    fig.innerHTML = "";
    out.className = "error";
    out.textContent = String(e.message ?? e);
  }
}

function normal() {
  return Math.sqrt(-2 * Math.log(1 - Math.random())) * Math.cos(2 * Math.PI * Math.random());
}

function randomLengths() {
  const modes = [[400, 12, 1.5], [360, 36, 3], [240, 120, 6]];
  const xs = [];
  for (const [n, mean, sd] of modes) {
    for (let i = 0; i < n; i++) xs.push(Math.max(1, Math.round(mean + sd * normal())));
  }
  return xs.join(" ");
}

await init();

$("lengths").value = randomLengths();
$("lengths-random").onclick = () => {
  $("lengths").value = randomLengths();
  $("lengths-run").click();
};
$("lengths-run").onclick = () =>
  show("lengths", () => densityCuts($("lengths").value, Number($("bw").value), Number($("ncuts").value), $("trim").checked));
$("seqs-run").onclick = () =>
  show("seqs", () => clusterSequences($("seqs").value, $("linkage").value, Number($("k").value)));
$("eng-run").onclick = () =>
  show("eng", () => engagementDemo(Number($("seed").value), Number($("groups").value)));

$("lengths-run").click();
$("seqs-run").click();

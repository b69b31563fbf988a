/** DOM wiring: panels, controls, and event plumbing around the Workspace. */

import { ApiClient } from "./api.js";
import { fitViewport, CanvasPanel, drawMembrane } from "./render.js";
import { mapperScene, membraneScene, projectionScene, type OverviewOptions } from "./scene.js";
import { Workspace } from "./state.js";
import type { MotifKind, Side } from "./types.js";

const MOTIF_GLYPHS: { kind: MotifKind; glyph: string; label: string }[] = [
  { kind: "one_to_one", glyph: "●—●", label: "one-to-one" },
  { kind: "fan_out", glyph: "●<", label: "fan-out" },
  { kind: "fan_in", glyph: ">●", label: "fan-in" },
  { kind: "crossing", glyph: "⤫", label: "crossing" },
  { kind: "vanishing_appearance", glyph: "●/∅", label: "vanishing" },
];

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

/** Non-blocking toast for API failures; the workspace keeps its last state. */
function toast(message: string): void {
  const status = element<HTMLDivElement>("status");
  status.textContent = message;
  window.setTimeout(() => {
    if (status.textContent === message) status.textContent = "";
  }, 5000);
}

function guarded(run: () => Promise<unknown>): void {
  run().catch((err) => toast(`request failed: ${err?.message ?? err}`));
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const workspace = new Workspace(api, (tick) => requestAnimationFrame(tick));

  const params = new URLSearchParams(window.location.search);
  let sessionId = params.get("session");
  if (!sessionId) {
    const status = element<HTMLDivElement>("status");
    status.textContent = "no ?session=<id> given; checking the server for one...";
    try {
      const response = await fetch("/sessions/default");
      if (response.ok) sessionId = (await response.json()).id;
    } catch {
      /* fall through to the message below */
    }
  }
  if (!sessionId) {
    element<HTMLDivElement>("status").textContent =
      "start the server with a config (`mapalign serve --config ...`) and open ?session=<id>";
    return;
  }
  await workspace.load(sessionId);
  wire(workspace);
}

function wire(workspace: Workspace): void {
  const panels = {
    mapperA: new CanvasPanel(element<HTMLCanvasElement>("mapper-a")),
    mapperB: new CanvasPanel(element<HTMLCanvasElement>("mapper-b")),
    projA: new CanvasPanel(element<HTMLCanvasElement>("proj-a")),
    projB: new CanvasPanel(element<HTMLCanvasElement>("proj-b")),
    membrane: new CanvasPanel(element<HTMLCanvasElement>("membrane")),
  };

  const lambdaSlider = element<HTMLInputElement>("lambda-slider");
  const lambdaValue = element<HTMLSpanElement>("lambda-value");
  lambdaSlider.addEventListener("input", () => {
    workspace.previewLambda(Number(lambdaSlider.value));
    lambdaValue.textContent = lambdaSlider.value;
  });
  lambdaSlider.addEventListener("change", () => {
    guarded(() => workspace.commitLambda(Number(lambdaSlider.value)));
  });

  element<HTMLInputElement>("overlay-toggle").addEventListener("change", () => workspace.toggleOverlay());

  const coloringSelect = element<HTMLSelectElement>("coloring");
  coloringSelect.addEventListener("change", () => {
    const value = coloringSelect.value;
    if (value === "categorical") workspace.setColoring({ mode: "categorical" });
    else if (value === "none") workspace.setColoring({ mode: "none" });
    else workspace.setColoring({ mode: "numeric", attr: value });
  });

  for (const key of ["alpha", "beta", "gamma"]) {
    element<HTMLInputElement>(`weight-${key}`).addEventListener("change", () => {
      guarded(() =>
        workspace.setAlignmentParams({
          alpha: Number(element<HTMLInputElement>("weight-alpha").value),
          beta: Number(element<HTMLInputElement>("weight-beta").value),
          gamma: Number(element<HTMLInputElement>("weight-gamma").value),
        }),
      );
    });
  }
  element<HTMLInputElement>("cluster-k").addEventListener("change", () => {
    const raw = element<HTMLInputElement>("cluster-k").value;
    guarded(() => workspace.setAlignmentParams({ k: raw ? Number(raw) : null }));
  });

  const glyphBar = element<HTMLDivElement>("motif-glyphs");
  const allButton = document.createElement("button");
  allButton.textContent = "all";
  allButton.addEventListener("click", () => workspace.setMotifFilter(null));
  glyphBar.appendChild(allButton);
  for (const { kind, glyph, label } of MOTIF_GLYPHS) {
    const button = document.createElement("button");
    button.textContent = glyph;
    button.title = label;
    button.addEventListener("click", () => workspace.setMotifFilter(kind));
    glyphBar.appendChild(button);
  }

  const mergeSlider = element<HTMLInputElement>("merge-slider");
  mergeSlider.addEventListener("change", () => guarded(() => workspace.setMergeStep(Number(mergeSlider.value))));
  element<HTMLSelectElement>("merge-strategy").addEventListener("change", () => {
    const value = element<HTMLSelectElement>("merge-strategy").value as "conditional" | "raw";
    guarded(() => workspace.setMergeStrategy(value));
  });

  element<HTMLButtonElement>("summarize-btn").addEventListener("click", () => {
    const ids = (workspace.itemTable?.shared ?? []).map((entry) => entry.id);
    if (ids.length) guarded(() => workspace.summarizeItems(ids));
  });

  const pathEndpoints = new Map<Side, number>();
  for (const [panel, side] of [
    [panels.mapperA, "a"],
    [panels.mapperB, "b"],
  ] as [CanvasPanel, Side][]) {
    panel.canvas.addEventListener("click", (event) => {
      const hit = panel.hitTest(event.offsetX, event.offsetY);
      if (!hit) return;
      const ref = hit.ref as { type: string; side: Side; id: number; pairId?: number };
      if (ref.type === "node") {
        if (event.shiftKey) {
          guarded(() => workspace.manualSelect(side, workspace.expandComponent(side, ref.id)));
        } else if (event.ctrlKey || event.metaKey) {
          const pending = pathEndpoints.get(side);
          if (pending === undefined) {
            pathEndpoints.set(side, ref.id);
            toast(`path start: ${side}:${ref.id}; ctrl-click the other endpoint`);
          } else {
            pathEndpoints.delete(side);
            const path = workspace.pathBetween(side, pending, ref.id);
            if (path.length) guarded(() => workspace.manualSelect(side, path));
            else toast(`no path between ${side}:${pending} and ${side}:${ref.id}`);
          }
        } else {
          guarded(() => workspace.selectNode(side, ref.id));
        }
      } else if (ref.type === "bubble" && ref.pairId !== undefined) {
        guarded(() => workspace.selectPair(ref.pairId!));
      }
    });
    panel.canvas.addEventListener("mousemove", (event) => {
      const hit = panel.hitTest(event.offsetX, event.offsetY);
      const ref = hit?.ref as { type?: string; pairId?: number } | undefined;
      workspace.hoverBubble(ref?.type === "bubble" && ref.pairId !== undefined ? ref.pairId : null);
    });
  }

  panels.membrane.canvas.addEventListener("click", (event) => {
    const hit = panels.membrane.hitTest(event.offsetX, event.offsetY);
    const ref = hit?.ref as { type?: string; a?: number; b?: number } | undefined;
    if (ref?.type === "membrane-inter" && ref.a !== undefined && ref.b !== undefined) {
      workspace.selectMembraneEdge(ref.a, ref.b);
    }
  });
  let dragging: number | null = null;
  panels.membrane.canvas.addEventListener("mousedown", (event) => {
    const hit = panels.membrane.hitTest(event.offsetX, event.offsetY);
    const ref = hit?.ref as { type?: string; id?: number } | undefined;
    if (ref?.type === "supernode" && ref.id !== undefined) dragging = ref.id;
  });
  panels.membrane.canvas.addEventListener("mousemove", (event) => {
    if (dragging === null) return;
    const [wx, wy] = panels.membrane.toWorld(event.offsetX, event.offsetY);
    workspace.dragSupernode(dragging, wx, wy);
  });
  window.addEventListener("mouseup", () => (dragging = null));

  workspace.onChange(() => render(workspace, panels));
  render(workspace, panels);
}

function render(workspace: Workspace, panels: Record<string, CanvasPanel>): void {
  const positions = workspace.currentPositions();
  if (!positions || !workspace.mappers) return;

  const visible = new Set(workspace.visiblePairs().map((p) => p.id));
  const options: OverviewOptions = {
    coloring: workspace.coloring,
    showOverlay: workspace.showOverlay,
    highlightedItems: workspace.highlightedItems,
    highlightedPair: workspace.highlightedPair,
    motifFilter: workspace.motifFilter,
    visiblePairIds: visible,
    nodeRadiusScale: 1,
  };

  for (const [panel, side, graph] of [
    [panels.mapperA, "a", workspace.mappers.a],
    [panels.mapperB, "b", workspace.mappers.b],
  ] as const) {
    const marks = mapperScene(side, graph, positions, workspace.projection, workspace.alignments, options);
    panel.viewport = fitViewport(Object.values(positions[side]));
    panel.clear();
    panel.draw(marks);
  }

  if (workspace.projection) {
    for (const [panel, side] of [
      [panels.projA, "a"],
      [panels.projB, "b"],
    ] as const) {
      const marks = projectionScene(side, workspace.projection, options);
      panel.viewport = fitViewport(Object.values(workspace.projection[side]));
      panel.clear();
      panel.draw(marks);
    }
  }

  renderPairList(workspace);
  renderDetail(workspace, panels.membrane);
}

function renderPairList(workspace: Workspace): void {
  const list = element<HTMLUListElement>("pair-list");
  list.replaceChildren();
  for (const pair of workspace.visiblePairs()) {
    const item = document.createElement("li");
    const motif = pair.motif?.kind ?? "?";
    item.textContent = `#${pair.id} ${motif}  J=${pair.content_jaccard.toFixed(2)} S=${pair.coherence.toFixed(2)}`;
    if (pair.id === workspace.selectedPairId) item.classList.add("selected");
    item.addEventListener("click", () => guarded(() => workspace.selectPair(pair.id)));
    list.appendChild(item);
  }
}

function renderDetail(workspace: Workspace, panel: CanvasPanel): void {
  const slider = element<HTMLInputElement>("merge-slider");
  const entropy = element<HTMLSpanElement>("merge-entropy");
  if (workspace.merge) {
    slider.max = String(workspace.mergeStepMax);
    slider.value = String(workspace.mergeStep ?? workspace.mergeStepMax);
    const sequence = workspace.merge.sequence;
    const step = workspace.mergeStep ?? sequence.steps.length;
    const h = step === 0 ? workspace.merge.initial_H : sequence.steps[step - 1].H_after;
    entropy.textContent = `H = ${h.toFixed(4)} (step ${step}/${sequence.steps.length})`;
    const scene = membraneScene(workspace.merge, {
      overrides: workspace.membraneOverrides,
      highlightedEdge: workspace.selectedMembraneEdge,
    });
    const points: [number, number][] = scene.ovals.flatMap((o) => [
      [o.x - o.r, o.y - o.r - 0.5],
      [o.x + o.r, o.y + o.r + 0.5],
    ]);
    panel.viewport = fitViewport(points);
    panel.clear();
    drawMembrane(panel, scene);
  }

  const table = element<HTMLTableSectionElement>("item-rows");
  table.replaceChildren();
  if (workspace.itemTable) {
    element<HTMLSpanElement>("table-title").textContent = workspace.itemTable.title;
    const groups: [string, typeof workspace.itemTable.shared][] = [
      ["shared", workspace.itemTable.shared],
      ["only a", workspace.itemTable.only_a],
      ["only b", workspace.itemTable.only_b],
    ];
    for (const [group, entries] of groups) {
      for (const entry of entries) {
        const row = document.createElement("tr");
        row.innerHTML = `<td>${group}</td><td>${entry.id}</td><td>${entry.label ?? ""}</td><td>${entry.text ?? ""}</td>`;
        row.addEventListener("click", () => workspace.highlightItem(entry.id));
        table.appendChild(row);
      }
    }
  }

  const summaryBox = element<HTMLDivElement>("summary-box");
  if (workspace.summary) {
    summaryBox.textContent = workspace.summary.text;
    summaryBox.dataset.source = workspace.summary.source;
    element<HTMLSpanElement>("summary-badge").textContent =
      workspace.summary.source === "fallback" ? "extractive fallback" : "external summarizer";
  }
}

void boot();

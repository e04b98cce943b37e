/** Application wiring: three views over the read-only corpus-comparison API.
 *
 * Browse: aligned scatter of one corpus, color-coded by semantic group,
 * with neighbor highlighting, centering, and animated corpus transitions.
 * Inspect: the selected concept's aggregate neighbors in every corpus, with
 * warnings where it is present but low-confidence. Compare: mean +- std
 * similarity lines against a reference concept, with the reference's
 * low-confidence corpora omitted and footnoted.
 */

import { ApiClient, ApiError } from "./api.js";
import { fmt3, fmtMeanStd } from "./format.js";
import { drawCompareChart } from "./render/linechart.js";
import { paletteFor } from "./render/palette.js";
import { drawThumbnail, ScatterView, type ScatterDatum } from "./render/scatter.js";
import {
  initialState,
  selectConcept,
  setActiveCorpus,
  setCentered,
  setCompareSet,
  setMode,
  type Mode,
  type ViewState,
} from "./state.js";
import type { ConceptDetail, CorpusDescriptor, Projection } from "./types.js";
import {
  centerPoints,
  highlightSet,
  legendGroups,
  planTransition,
} from "./viewmodel/browse.js";
import { buildCompareChart } from "./viewmodel/compare.js";
import { buildInspect } from "./viewmodel/inspect.js";

function resolveBaseUrl(): string {
  const param = new URLSearchParams(location.search).get("api");
  return param ?? `${location.protocol}//${location.hostname}:8000`;
}

const api = new ApiClient(resolveBaseUrl());

let state: ViewState = initialState();
let corpora: CorpusDescriptor[] = [];
const projections = new Map<string, Projection>();
const details = new Map<string, ConceptDetail>();
let palette = new Map<string, string>();
let scatter: ScatterView | null = null;

const $ = <T extends HTMLElement>(selector: string): T =>
  document.querySelector(selector) as T;

function showError(message: string, retry: () => void): void {
  const banner = $("#banner");
  banner.innerHTML = "";
  banner.append(`${message} `);
  const button = document.createElement("button");
  button.textContent = "retry";
  button.addEventListener("click", () => {
    banner.hidden = true;
    retry();
  });
  banner.append(button);
  banner.hidden = false;
}

async function guarded<T>(action: () => Promise<T>, retry: () => void): Promise<T | null> {
  try {
    return await action();
  } catch (error) {
    const message =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    showError(message, retry);
    return null;
  }
}

async function fetchProjection(corpusId: string): Promise<Projection> {
  const cached = projections.get(corpusId);
  if (cached) return cached;
  const projection = await api.projection(corpusId);
  projections.set(corpusId, projection);
  return projection;
}

async function fetchDetail(conceptId: string): Promise<ConceptDetail | null> {
  const cached = details.get(conceptId);
  if (cached) return cached;
  const detail = await api.concept(conceptId);
  if (detail) details.set(conceptId, detail);
  return detail;
}

function scatterData(projection: Projection): ScatterDatum[] {
  const centered = state.centered ? state.selectedConcept : null;
  return centerPoints(projection.points, centered).map((p) => ({
    id: p.id,
    x: p.x,
    y: p.y,
    group: p.group,
    term: p.term,
  }));
}

function setViewState(next: ViewState): void {
  const modeChanged = next.mode !== state.mode;
  const corpusChanged = next.activeCorpus !== state.activeCorpus;
  const selectionChanged = next.selectedConcept !== state.selectedConcept;
  const centeredChanged = next.centered !== state.centered;
  state = next;
  if (modeChanged) renderModeTabs();
  void renderActiveView({ corpusChanged, selectionChanged, centeredChanged, modeChanged });
}

function renderModeTabs(): void {
  for (const mode of ["browse", "inspect", "compare"] as Mode[]) {
    $(`#tab-${mode}`).classList.toggle("active", state.mode === mode);
    $(`#view-${mode}`).hidden = state.mode !== mode;
  }
}

async function renderActiveView(changes: {
  corpusChanged?: boolean;
  selectionChanged?: boolean;
  centeredChanged?: boolean;
  modeChanged?: boolean;
}): Promise<void> {
  $("#selection-label").textContent = state.selectedConcept
    ? `selected: ${state.selectedConcept}`
    : "no concept selected";
  if (state.mode === "browse") {
    await renderBrowse(changes);
  } else if (state.mode === "inspect") {
    await renderInspect();
  } else {
    await renderCompare();
  }
}

// ---------------------------------------------------------------- browse --

async function renderBrowse(changes: {
  corpusChanged?: boolean;
  centeredChanged?: boolean;
  modeChanged?: boolean;
}): Promise<void> {
  if (!state.activeCorpus || !scatter) return;
  const view = scatter;
  const projection = await guarded(
    () => fetchProjection(state.activeCorpus as string),
    () => void renderBrowse(changes),
  );
  if (!projection) return;

  if (changes.corpusChanged || changes.centeredChanged || changes.modeChanged) {
    view.setData(scatterData(projection));
  }
  renderLegend(projection);
  view.setSelected(state.selectedConcept);

  if (state.selectedConcept) {
    const detail = await fetchDetail(state.selectedConcept).catch(() => null);
    if (detail && state.selectedConcept === detail.id) {
      view.setHighlight(highlightSet(detail, projection.corpus_id));
    }
  } else {
    view.setHighlight(new Set());
  }
  $("#center-toggle").toggleAttribute("disabled", !state.selectedConcept);
  ($("#center-toggle") as HTMLInputElement).checked = state.centered;
}

function renderLegend(projection: Projection): void {
  const legend = $("#legend");
  legend.innerHTML = "";
  for (const group of legendGroups(projection)) {
    const item = document.createElement("div");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = palette.get(group) ?? "#888";
    item.append(swatch, group);
    legend.append(item);
  }
}

async function hoverThumbnail(corpusId: string | null): Promise<void> {
  if (!scatter || state.mode !== "browse") return;
  if (!corpusId || corpusId === state.activeCorpus) {
    scatter.showTrajectories(null);
    return;
  }
  const [from, to] = await Promise.all([
    fetchProjection(state.activeCorpus as string),
    fetchProjection(corpusId),
  ]);
  const centered = state.centered ? state.selectedConcept : null;
  const plan = planTransition(
    { ...from, points: centerPoints(from.points, centered) },
    { ...to, points: centerPoints(to.points, centered) },
  );
  scatter.showTrajectories(plan);
}

async function clickThumbnail(corpusId: string): Promise<void> {
  if (corpusId === state.activeCorpus) return;
  if (state.mode !== "browse" || !scatter) {
    setViewState(setActiveCorpus(state, corpusId));
    renderThumbnails();
    return;
  }
  const view = scatter;
  const [from, to] = await Promise.all([
    fetchProjection(state.activeCorpus as string),
    fetchProjection(corpusId),
  ]);
  const centered = state.centered ? state.selectedConcept : null;
  const fromPts = { ...from, points: centerPoints(from.points, centered) };
  const toPts = { ...to, points: centerPoints(to.points, centered) };
  const plan = planTransition(fromPts, toPts);
  state = setActiveCorpus(state, corpusId);
  renderThumbnails();
  view.transitionTo(
    toPts.points.map((p) => ({ id: p.id, x: p.x, y: p.y, group: p.group, term: p.term })),
    plan,
    () => void renderBrowse({}),
  );
}

function renderThumbnails(): void {
  const strip = $("#thumbs");
  strip.innerHTML = "";
  for (const corpus of corpora) {
    const cell = document.createElement("div");
    cell.className = "thumb" + (corpus.id === state.activeCorpus ? " active" : "");
    const canvas = document.createElement("canvas");
    canvas.width = 120;
    canvas.height = 90;
    const label = document.createElement("div");
    label.textContent = corpus.label;
    cell.append(canvas, label);
    cell.addEventListener("mouseenter", () => void hoverThumbnail(corpus.id));
    cell.addEventListener("mouseleave", () => void hoverThumbnail(null));
    cell.addEventListener("click", () => void clickThumbnail(corpus.id));
    strip.append(cell);
    void fetchProjection(corpus.id).then((projection) =>
      drawThumbnail(canvas, projection.points, palette),
    );
  }
}

// --------------------------------------------------------------- inspect --

async function renderInspect(): Promise<void> {
  const host = $("#inspect-columns");
  const side = $("#inspect-side");
  if (!state.selectedConcept) {
    host.innerHTML = "<p class='hint'>Select a concept (search or browse) to inspect it.</p>";
    side.innerHTML = "";
    return;
  }
  const conceptId = state.selectedConcept;
  let detail: ConceptDetail | null = null;
  try {
    detail = await fetchDetail(conceptId);
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      host.innerHTML = `<p class='hint'>${error.message} — only concepts that are high-confidence in at least one corpus can be inspected.</p>`;
      side.innerHTML = "";
      return;
    }
    showError(String(error), () => void renderInspect());
    return;
  }
  if (!detail || detail.id !== state.selectedConcept) return;
  const view = buildInspect(detail);

  host.innerHTML = "";
  for (const column of view.columns) {
    const section = document.createElement("div");
    section.className = "corpus-column";
    const heading = document.createElement("h3");
    heading.textContent = column.label;
    section.append(heading);
    if (!column.present) {
      const missing = document.createElement("p");
      missing.className = "hint";
      missing.textContent = "not present in this corpus";
      section.append(missing);
      host.append(section);
      continue;
    }
    if (column.warning) {
      const banner = document.createElement("div");
      banner.className = "warning-banner";
      banner.textContent =
        "warning: this concept is not high-confidence in this corpus; " +
        "neighbors below are still drawn from the high-confidence set";
      section.append(banner);
    }
    const table = document.createElement("table");
    table.innerHTML = "<tr><th>neighbor</th><th>sim</th></tr>";
    for (const neighbor of column.neighbors) {
      const row = document.createElement("tr");
      const name = document.createElement("td");
      name.textContent = neighbor.preferred_term;
      name.title = neighbor.id;
      const sim = document.createElement("td");
      sim.textContent = fmtMeanStd(neighbor.mean_sim, neighbor.std_sim);
      row.append(name, sim);
      row.addEventListener("click", () => setViewState(selectConcept(state, neighbor.id)));
      table.append(row);
    }
    section.append(table);
    host.append(section);
  }

  side.innerHTML = "";
  const title = document.createElement("h2");
  title.textContent = view.term;
  const group = document.createElement("p");
  group.className = "group-tag";
  group.textContent = view.group;
  side.append(title, group);
  if (view.synonyms.length) {
    const terms = document.createElement("p");
    terms.textContent = `terms: ${view.synonyms.join(", ")}`;
    side.append(terms);
  }
  for (const definition of view.definitions) {
    const p = document.createElement("p");
    p.className = "definition";
    p.textContent = definition;
    side.append(p);
  }
  side.append(sparklineSvg(view.sparkline));
}

function sparklineSvg(points: Array<{ corpusId: string; ec: number | null }>): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  const w = 220;
  const h = 60;
  svg.setAttribute("viewBox", `0 0 ${w} ${h}`);
  svg.setAttribute("class", "sparkline");
  const step = w / Math.max(points.length - 1, 1);
  let d = "";
  points.forEach((point, i) => {
    if (point.ec === null) {
      d += " ";
      return;
    }
    const x = i * step;
    const y = h - 8 - point.ec * (h - 16);
    d += `${d.trim().length === 0 || d.endsWith(" ") ? "M" : "L"}${x},${y}`;
  });
  const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
  path.setAttribute("d", d.trim());
  path.setAttribute("fill", "none");
  path.setAttribute("stroke", "#4e79a7");
  path.setAttribute("stroke-width", "2");
  svg.append(path);
  points.forEach((point, i) => {
    if (point.ec === null) return;
    const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", String(i * step));
    circle.setAttribute("cy", String(h - 8 - point.ec * (h - 16)));
    circle.setAttribute("r", "3");
    circle.setAttribute("fill", point.ec >= 0.5 ? "#4e79a7" : "#d62728");
    const label = document.createElementNS("http://www.w3.org/2000/svg", "title");
    label.textContent = `${point.corpusId}: ${fmt3(point.ec)}`;
    circle.append(label);
    svg.append(circle);
  });
  return svg;
}

// --------------------------------------------------------------- compare --

async function renderCompare(): Promise<void> {
  const refLabel = $("#compare-ref");
  refLabel.textContent = state.compare.reference ?? "(none — select a concept)";
  renderCompareChips();
  const chartCanvas = $("#chart") as HTMLCanvasElement;
  const footnote = $("#chart-footnote");
  const tables = $("#compare-tables");
  if (!state.compare.reference || state.compare.comparisons.length === 0) {
    chartCanvas.getContext("2d")?.clearRect(0, 0, chartCanvas.width, chartCanvas.height);
    footnote.textContent = "";
    tables.innerHTML =
      "<p class='hint'>Pick a reference concept and at least one comparison.</p>";
    return;
  }
  const reference = state.compare.reference;
  const response = await guarded(
    () => api.similarity(reference, state.compare.comparisons),
    () => void renderCompare(),
  );
  if (!response) return;
  const chart = buildCompareChart(response);
  drawCompareChart(chartCanvas, chart);
  footnote.textContent = chart.footnote ?? "";

  tables.innerHTML = "";
  const conceptIds = [reference, ...state.compare.comparisons];
  const loaded = await Promise.all(
    conceptIds.map((cid) => fetchDetail(cid).catch(() => null)),
  );
  for (const corpus of corpora) {
    const block = document.createElement("div");
    block.className = "corpus-column";
    const heading = document.createElement("h3");
    heading.textContent = corpus.label;
    block.append(heading);
    for (const detail of loaded) {
      if (!detail) continue;
      const sub = document.createElement("h4");
      sub.textContent = detail.preferred_term;
      block.append(sub);
      const perCorpus = detail.corpora.find((b) => b.corpus_id === corpus.id);
      if (!perCorpus || !perCorpus.present) {
        const missing = document.createElement("p");
        missing.className = "hint";
        missing.textContent = "not present";
        block.append(missing);
        continue;
      }
      const table = document.createElement("table");
      for (const neighbor of perCorpus.neighbors.slice(0, 5)) {
        const row = document.createElement("tr");
        row.innerHTML = `<td>${neighbor.preferred_term}</td><td>${fmt3(neighbor.mean_sim)}</td>`;
        table.append(row);
      }
      block.append(table);
    }
    tables.append(block);
  }
}

function renderCompareChips(): void {
  const chips = $("#compare-chips");
  chips.innerHTML = "";
  state.compare.comparisons.forEach((cid) => {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.textContent = cid + " ✕";
    chip.addEventListener("click", () => {
      const comparisons = state.compare.comparisons.filter((c) => c !== cid);
      setViewState(setCompareSet(state, { ...state.compare, comparisons }));
    });
    chips.append(chip);
  });
}

// ---------------------------------------------------------------- search --

function wireSearch(): void {
  const input = $("#search") as HTMLInputElement;
  const results = $("#search-results");
  input.addEventListener("input", () => {
    const q = input.value.trim();
    if (q.length < 2) {
      results.hidden = true;
      return;
    }
    void api
      .search(q)
      .then((response) => {
        if (!response) return; // stale, superseded by a newer keystroke
        results.innerHTML = "";
        for (const hit of response.results.slice(0, 12)) {
          const item = document.createElement("div");
          item.className = "search-hit";
          item.textContent = `${hit.preferred_term} — ${hit.semantic_group}`;
          item.addEventListener("click", () => {
            results.hidden = true;
            input.value = hit.preferred_term;
            onConceptChosen(hit.id);
          });
          results.append(item);
        }
        results.hidden = response.results.length === 0;
      })
      .catch(() => {
        results.hidden = true;
      });
  });
}

function onConceptChosen(conceptId: string): void {
  let next = selectConcept(state, conceptId);
  if (next.mode === "compare") {
    if (!next.compare.reference) {
      next = setCompareSet(next, { ...next.compare, reference: conceptId });
    } else if (
      conceptId !== next.compare.reference &&
      !next.compare.comparisons.includes(conceptId) &&
      next.compare.comparisons.length < 8
    ) {
      next = setCompareSet(next, {
        ...next.compare,
        comparisons: [...next.compare.comparisons, conceptId],
      });
    }
  }
  setViewState(next);
}

// ------------------------------------------------------------------ boot --

async function boot(): Promise<void> {
  const loaded = await guarded(() => api.corpora(), () => void boot());
  if (!loaded) return;
  corpora = loaded;
  if (corpora.length === 0) {
    showError("the snapshot contains no corpora", () => void boot());
    return;
  }
  const projectionList = await guarded(
    () => Promise.all(corpora.map((c) => fetchProjection(c.id))),
    () => void boot(),
  );
  if (!projectionList) return;
  palette = paletteFor(projectionList.flatMap((p) => p.points.map((x) => x.group)));

  const canvas = $("#scatter") as HTMLCanvasElement;
  const dpr = devicePixelRatio;
  canvas.width = canvas.clientWidth * dpr;
  canvas.height = canvas.clientHeight * dpr;
  scatter = new ScatterView(canvas, (id) => {
    if (id) onConceptChosen(id);
    else setViewState(selectConcept(state, null));
  });
  scatter.setPalette(palette);

  for (const mode of ["browse", "inspect", "compare"] as Mode[]) {
    $(`#tab-${mode}`).addEventListener("click", () => setViewState(setMode(state, mode)));
  }
  ($("#center-toggle") as HTMLInputElement).addEventListener("change", (event) => {
    setViewState(setCentered(state, (event.target as HTMLInputElement).checked));
  });
  wireSearch();

  state = setActiveCorpus(state, corpora[0].id);
  renderThumbnails();
  renderModeTabs();
  await renderActiveView({ corpusChanged: true, modeChanged: true });
}

void boot();

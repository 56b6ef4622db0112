// Application shell: question form, ranked result cards with heatmaps,
// and per-table annotation feedback.
//
// State rules: at most one search in flight (stale responses are dropped
// by sequence number), results are cleared the moment a new search
// starts, and a failed annotation keeps its draft so the user can retry.

import type { SearchApi } from "./api.js";
import { renderHeatmap } from "./heatmap.js";
import type {
  AnnotationPayload,
  RankedTablePayload,
  SearchResultPayload,
  Verdict,
} from "./types.js";

export interface ViewState {
  question: string;
  loading: boolean;
  results: SearchResultPayload | null;
  selectedTableId: string | null;
  error: string | null;
}

const SURROUNDING_TEXT_PREVIEW_LINES = 3;

export class App {
  readonly state: ViewState = {
    question: "",
    loading: false,
    results: null,
    selectedTableId: null,
    error: null,
  };
  private sequence = 0;

  private readonly input: HTMLInputElement;
  private readonly searchButton: HTMLButtonElement;
  private readonly status: HTMLElement;
  private readonly resultsNode: HTMLElement;
  private readonly toast: HTMLElement;

  constructor(private readonly root: HTMLElement, private readonly api: SearchApi) {
    root.innerHTML = "";

    const form = document.createElement("form");
    form.className = "search-form";
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitSearch();
    });

    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "Ask a question about the table corpus...";
    this.input.className = "search-input";
    this.input.addEventListener("input", () => {
      this.state.question = this.input.value;
      this.searchButton.disabled = this.input.value.trim() === "";
    });

    this.searchButton = document.createElement("button");
    this.searchButton.type = "submit";
    this.searchButton.className = "search-button";
    this.searchButton.textContent = "Search";
    this.searchButton.disabled = true;

    const reset = document.createElement("button");
    reset.type = "button";
    reset.className = "reset-button";
    reset.textContent = "Reset";
    reset.addEventListener("click", () => this.reset());

    // server-side model refitting is not part of this deployment; the
    // control is shown but permanently disabled
    const retrain = document.createElement("button");
    retrain.type = "button";
    retrain.className = "retrain-button";
    retrain.textContent = "Re-train model";
    retrain.disabled = true;
    retrain.title = "Model re-training is not available in this deployment.";

    form.append(this.input, this.searchButton, reset, retrain);

    this.status = document.createElement("div");
    this.status.className = "status";
    this.status.setAttribute("aria-live", "polite");

    this.resultsNode = document.createElement("div");
    this.resultsNode.className = "results";

    this.toast = document.createElement("div");
    this.toast.className = "toast hidden";

    root.append(form, this.status, this.resultsNode, this.toast);
  }

  reset(): void {
    this.sequence += 1; // invalidate any in-flight search
    this.state.question = "";
    this.state.results = null;
    this.state.loading = false;
    this.state.error = null;
    this.input.value = "";
    this.searchButton.disabled = true;
    this.status.textContent = "";
    this.resultsNode.innerHTML = "";
  }

  async submitSearch(): Promise<void> {
    const question = this.input.value.trim();
    if (question === "") {
      return;
    }
    const seq = ++this.sequence;
    this.state.loading = true;
    this.state.results = null;
    this.state.error = null;
    this.resultsNode.innerHTML = "";
    this.status.textContent = "Searching...";
    try {
      const results = await this.api.search(question);
      if (seq !== this.sequence) {
        return; // superseded by a newer search
      }
      this.state.results = results;
      this.state.loading = false;
      this.status.textContent =
        results.tables.length === 0 ? "No tables matched." : "";
      this.renderResults(results);
    } catch (error) {
      if (seq !== this.sequence) {
        return;
      }
      this.state.loading = false;
      this.state.error = error instanceof Error ? error.message : String(error);
      this.status.textContent = `Search failed: ${this.state.error}`;
      this.status.classList.add("error");
    }
  }

  private renderResults(results: SearchResultPayload): void {
    this.resultsNode.innerHTML = "";
    const topCellByTable = new Map<string, { row: number; col: number }>();
    if (results.cells.length > 0) {
      const top = results.cells[0];
      topCellByTable.set(top.table_id, { row: top.row, col: top.col });
    }
    results.tables.forEach((table, index) => {
      const card = this.renderCard(results, table, index === 0);
      this.resultsNode.appendChild(card);
    });
  }

  private renderCard(
    results: SearchResultPayload,
    table: RankedTablePayload,
    expanded: boolean,
  ): HTMLElement {
    const card = document.createElement("article");
    card.className = "result-card";
    card.dataset.tableId = table.table_id;
    card.dataset.rank = String(table.rank);
    if (expanded) card.classList.add("expanded");

    const heading = document.createElement("header");
    heading.className = "result-heading";
    const title = document.createElement("h3");
    title.textContent = table.title || table.table_id;
    const badge = document.createElement("span");
    badge.className = "rank-badge";
    badge.textContent = `#${table.rank} · score ${table.score.toFixed(3)}`;
    heading.append(title, badge);
    card.appendChild(heading);

    if (table.surrounding_text) {
      card.appendChild(this.renderSurroundingText(table.surrounding_text));
    }

    const topCell = results.cells.find((c) => c.table_id === table.table_id);
    card.appendChild(
      renderHeatmap(
        table.header,
        table.rows,
        table.heatmap,
        topCell ? { row: topCell.row, col: topCell.col } : undefined,
      ),
    );

    card.appendChild(this.renderAnnotationForm(results, table, topCell ?? null));
    card.addEventListener("click", () => {
      this.state.selectedTableId = table.table_id;
    });
    return card;
  }

  private renderSurroundingText(text: string): HTMLElement {
    const wrapper = document.createElement("div");
    wrapper.className = "surrounding-text";
    const lines = text.split("\n");
    const paragraph = document.createElement("p");
    if (lines.length <= SURROUNDING_TEXT_PREVIEW_LINES) {
      paragraph.textContent = text;
      wrapper.appendChild(paragraph);
      return wrapper;
    }
    paragraph.textContent = lines.slice(0, SURROUNDING_TEXT_PREVIEW_LINES).join("\n");
    const expander = document.createElement("button");
    expander.type = "button";
    expander.className = "expander";
    expander.textContent = "Show more";
    expander.addEventListener("click", () => {
      const collapsed = expander.textContent === "Show more";
      paragraph.textContent = collapsed
        ? text
        : lines.slice(0, SURROUNDING_TEXT_PREVIEW_LINES).join("\n");
      expander.textContent = collapsed ? "Show less" : "Show more";
    });
    wrapper.append(paragraph, expander);
    return wrapper;
  }

  private renderAnnotationForm(
    results: SearchResultPayload,
    table: RankedTablePayload,
    topCell: { row: number; col: number } | null,
  ): HTMLElement {
    const form = document.createElement("form");
    form.className = "annotation-form";

    const verdicts: Verdict[] = ["correct", "incorrect", "partial"];
    let chosen: Verdict | null = null;

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.className = "annotation-submit";
    submit.textContent = "Send feedback";
    submit.disabled = true;

    const group = document.createElement("div");
    group.className = "verdict-group";
    verdicts.forEach((verdict) => {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = `verdict-${table.table_id}`;
      radio.value = verdict;
      radio.addEventListener("change", () => {
        chosen = verdict;
        submit.disabled = false;
      });
      label.append(radio, document.createTextNode(` ${verdict}`));
      group.appendChild(label);
    });

    const note = document.createElement("input");
    note.type = "text";
    note.placeholder = "Optional note";
    note.className = "annotation-note";

    const feedback = document.createElement("span");
    feedback.className = "annotation-feedback";

    form.append(group, note, submit, feedback);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (chosen === null) {
        return;
      }
      const annotation: AnnotationPayload = {
        qid: results.qid,
        question: this.state.question,
        table_id: table.table_id,
        row: topCell?.row ?? null,
        col: topCell?.col ?? null,
        verdict: chosen,
        note: note.value,
      };
      submit.disabled = true;
      void this.api
        .annotate(annotation)
        .then(() => {
          // success: the draft is cleared
          form.reset();
          chosen = null;
          note.value = "";
          feedback.textContent = "";
          this.showToast("Feedback recorded, thank you.");
        })
        .catch((error: unknown) => {
          // failure: keep the draft so the user can retry as-is
          submit.disabled = false;
          feedback.textContent = `Could not send feedback (${
            error instanceof Error ? error.message : String(error)
          }). Try again.`;
          feedback.classList.add("error");
        });
    });
    return form;
  }

  showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.classList.remove("hidden");
    setTimeout(() => this.toast.classList.add("hidden"), 2500);
  }
}

export function createApp(root: HTMLElement, api: SearchApi): App {
  return new App(root, api);
}

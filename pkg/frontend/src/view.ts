import { SessionController, ViewState } from "./controller.js";
import { cellLabel } from "./scale.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function stimulus(side: "left" | "right", label: string, asset: string | null): HTMLElement {
  const box = el("figure", `stimulus stimulus-${side}`);
  if (asset) {
    const img = el("img");
    img.src = asset;
    img.alt = label;
    box.appendChild(img);
  } else {
    box.appendChild(el("div", "stimulus-placeholder", label));
  }
  box.appendChild(el("figcaption", "stimulus-label", label));
  return box;
}

function pairScreen(state: Extract<ViewState, { kind: "pair" }>, controller: SessionController): HTMLElement {
  const root = el("section", "screen pair-screen");
  root.appendChild(
    el("p", "progress", `Comparison ${state.answered + 1} of ${state.total}`),
  );

  const stage = el("div", "stage");
  stage.appendChild(stimulus("left", state.left.label, state.left.asset));
  stage.appendChild(el("div", "versus", "vs"));
  stage.appendChild(stimulus("right", state.right.label, state.right.asset));
  root.appendChild(stage);

  root.appendChild(el("p", "prompt", "Which layout do you prefer, and how strongly?"));

  const row = el("div", "scale-row");
  row.setAttribute("role", "radiogroup");
  for (let position = 0; position < 9; position++) {
    const cell = el("button", "scale-cell");
    cell.type = "button";
    cell.dataset.position = String(position);
    cell.setAttribute("role", "radio");
    cell.setAttribute("aria-checked", state.selection === position ? "true" : "false");
    cell.title = cellLabel(position);
    if (state.selection === position) cell.classList.add("selected");
    cell.appendChild(el("span", "cell-dot"));
    cell.appendChild(el("span", "cell-caption", cellLabel(position)));
    cell.addEventListener("click", () => {
      controller.select(position);
    });
    row.appendChild(cell);
  }
  root.appendChild(row);

  const submit = el("button", "submit", state.submitting ? "Submitting..." : "Submit");
  submit.type = "button";
  submit.id = "submit";
  submit.disabled = state.selection === null || state.submitting;
  submit.addEventListener("click", () => {
    void controller.submitAndAdvance();
  });
  root.appendChild(submit);

  if (state.queued) {
    const note = el("div", "queued-note");
    note.appendChild(el("span", undefined, "Connection lost; your answer is queued."));
    const retry = el("button", "retry", "Retry");
    retry.type = "button";
    retry.addEventListener("click", () => {
      void controller.retry();
    });
    note.appendChild(retry);
    root.appendChild(note);
  }
  if (state.error) {
    root.appendChild(el("p", "error", state.error));
  }
  return root;
}

function weightsChart(weights: Record<string, number>): HTMLElement {
  const wrap = el("div", "weights");
  const max = Math.max(...Object.values(weights));
  for (const [label, value] of Object.entries(weights)) {
    const row = el("div", "weight-row");
    row.appendChild(el("span", "weight-label", label));
    const bar = el("div", "weight-bar");
    bar.style.width = `${(100 * value) / max}%`;
    row.appendChild(bar);
    row.appendChild(el("span", "weight-value", value.toFixed(4)));
    wrap.appendChild(row);
  }
  return wrap;
}

function reviewScreen(state: Extract<ViewState, { kind: "review" }>, controller: SessionController): HTMLElement {
  const root = el("section", "screen review-screen");
  root.appendChild(el("h2", undefined, "Your preferences"));
  const status = state.status;
  if (status.weights) root.appendChild(weightsChart(status.weights));

  const cr = status.cr ?? NaN;
  const guideline = status.cr_guideline ?? 0.1;
  const crLine = el("p", "cr-line");
  crLine.id = "cr-line";
  crLine.dataset.cr = String(cr);
  const marker = el("span", status.above_guideline ? "cr-marker cr-high" : "cr-marker cr-ok");
  marker.textContent = status.above_guideline ? "above guideline" : "within guideline";
  crLine.appendChild(
    el("span", undefined, `Consistency ratio ${cr.toFixed(3)} (guideline ${guideline}) `),
  );
  crLine.appendChild(marker);
  root.appendChild(crLine);

  const accept = el("button", "accept", "Accept and finish");
  accept.type = "button";
  accept.id = "accept";
  accept.addEventListener("click", () => {
    void controller.accept();
  });
  root.appendChild(accept);

  const suggestions = status.inconsistent_pairs ?? [];
  if (suggestions.length > 0) {
    const box = el("div", "revision-box");
    box.appendChild(
      el(
        "p",
        undefined,
        status.above_guideline
          ? "Your answers are fairly inconsistent; consider revisiting these comparisons:"
          : "Most inconsistent comparisons:",
      ),
    );
    const list = el("ul", "revision-list");
    for (const pair of suggestions) {
      const item = el("li");
      item.appendChild(el("span", undefined, `${pair.left} vs ${pair.right}`));
      list.appendChild(item);
    }
    box.appendChild(list);
    const revise = el("button", "revise", "Revise these answers");
    revise.type = "button";
    revise.id = "revise";
    revise.addEventListener("click", () => {
      void controller.revise(suggestions.map(({ left, right }) => ({ left, right })));
    });
    box.appendChild(revise);
    root.appendChild(box);
  }
  return root;
}

function completeScreen(state: Extract<ViewState, { kind: "complete" }>): HTMLElement {
  const root = el("section", "screen complete-screen");
  root.appendChild(el("h2", undefined, "Thank you!"));
  root.appendChild(el("p", undefined, "Your comparisons have been recorded."));
  if (state.status.weights) root.appendChild(weightsChart(state.status.weights));
  if (state.status.cr !== undefined) {
    root.appendChild(el("p", "cr-line", `Final consistency ratio: ${state.status.cr.toFixed(3)}`));
  }
  return root;
}

/** Render the controller state into the container (single-page flow). */
export function render(container: HTMLElement, state: ViewState, controller: SessionController): void {
  container.textContent = "";
  switch (state.kind) {
    case "loading":
      container.appendChild(el("p", "loading", "Loading..."));
      break;
    case "pair":
      container.appendChild(pairScreen(state, controller));
      break;
    case "review":
      container.appendChild(reviewScreen(state, controller));
      break;
    case "complete":
      container.appendChild(completeScreen(state));
      break;
    case "fatal":
      container.appendChild(el("p", "error", state.message));
      break;
  }
}

/**
 * Keyboard support: digits 1..9 select the corresponding cell, Enter
 * submits. Returns the handler for tests.
 */
export function keyboardHandler(controller: SessionController): (ev: KeyboardEvent) => void {
  return (ev: KeyboardEvent) => {
    if (ev.key >= "1" && ev.key <= "9") {
      controller.select(Number(ev.key) - 1);
    } else if (ev.key === "Enter") {
      void controller.submitAndAdvance();
    }
  };
}

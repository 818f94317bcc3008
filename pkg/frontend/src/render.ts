/** Pure rendering of the results region: a function of view state only.
 *
 * Each result card shows the title (linked to the source site), the
 * snippet split into pre/answer/post text segments with the answer in a
 * <mark>, and the combined confidence. Text segments, never injected
 * markup, so snippet content that looks like HTML stays inert.
 */

import type { AskResult, AskResponse } from "./api";

export type ViewState =
  | { kind: "idle" }
  | { kind: "loading"; question: string }
  | { kind: "results"; question: string; response: AskResponse }
  | { kind: "empty"; question: string }
  | { kind: "invalid"; message: string }
  | { kind: "error"; question: string; message: string };

/** Slice by Unicode scalar values. JS string indexing counts UTF-16 code
 * units, so astral characters would shift server offsets; code points
 * match the server's convention. */
export function codePointSlice(s: string, start: number, end: number): string {
  return Array.from(s).slice(start, end).join("");
}

export function renderResults(state: ViewState): HTMLElement {
  const region = document.createElement("div");
  region.className = "results-region";
  region.dataset.state = state.kind;

  switch (state.kind) {
    case "idle":
      break;
    case "loading":
      region.appendChild(message("status", "Searching…"));
      break;
    case "invalid":
      region.appendChild(message("validation-error", state.message));
      break;
    case "error": {
      region.appendChild(
        message("error", `Something went wrong: ${state.message}`),
      );
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry";
      retry.textContent = "Retry";
      region.appendChild(retry);
      break;
    }
    case "empty":
      region.appendChild(
        message("empty", "No answers found. Try rephrasing the question."),
      );
      break;
    case "results": {
      const list = document.createElement("ol");
      list.className = "result-list";
      for (const result of state.response.results) {
        list.appendChild(renderCard(result));
      }
      region.appendChild(list);
      break;
    }
  }
  return region;
}

function message(className: string, text: string): HTMLElement {
  const p = document.createElement("p");
  p.className = className;
  p.textContent = text;
  return p;
}

export function renderCard(result: AskResult): HTMLElement {
  const card = document.createElement("li");
  card.className = "result-card";

  const heading = document.createElement("h3");
  const link = document.createElement("a");
  link.href = result.url;
  link.target = "_blank";
  link.rel = "noopener noreferrer";
  link.textContent = result.title || result.url;
  heading.appendChild(link);
  card.appendChild(heading);

  const snippet = document.createElement("p");
  snippet.className = "snippet";
  if (result.answer === null) {
    snippet.appendChild(document.createTextNode(result.snippet));
  } else {
    const { start, end } = result.answer;
    snippet.appendChild(
      document.createTextNode(codePointSlice(result.snippet, 0, start)),
    );
    const mark = document.createElement("mark");
    mark.textContent = codePointSlice(result.snippet, start, end);
    snippet.appendChild(mark);
    snippet.appendChild(
      document.createTextNode(
        codePointSlice(result.snippet, end, Array.from(result.snippet).length),
      ),
    );
  }
  card.appendChild(snippet);

  const score = document.createElement("span");
  score.className = "score";
  score.textContent = `q = ${result.q.toFixed(4)}`;
  card.appendChild(score);

  return card;
}

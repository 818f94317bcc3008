/** Wire the static form, the controller and the render function together. */

import { ApiClient } from "./api";
import { AskController } from "./controller";
import { renderResults, type ViewState } from "./render";

export interface App {
  controller: AskController;
  root: HTMLElement;
}

export function initApp(root: HTMLElement, api: ApiClient): App {
  root.innerHTML = "";

  const form = document.createElement("form");
  form.className = "ask-form";

  const input = document.createElement("input");
  input.type = "text";
  input.name = "question";
  input.placeholder = "Pune o întrebare…";
  input.autocomplete = "off";
  form.appendChild(input);

  const modelSelect = document.createElement("select");
  modelSelect.name = "model";
  modelSelect.ariaLabel = "Model";
  form.appendChild(modelSelect);

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Ask";
  form.appendChild(submit);

  const resetButton = document.createElement("button");
  resetButton.type = "button";
  resetButton.className = "reset";
  resetButton.textContent = "New question";
  form.appendChild(resetButton);

  let resultsRegion = renderResults({ kind: "idle" });
  root.appendChild(form);
  root.appendChild(resultsRegion);

  const swapRegion = (state: ViewState) => {
    const next = renderResults(state);
    resultsRegion.replaceWith(next);
    resultsRegion = next;
    const retry = next.querySelector("button.retry");
    if (retry instanceof HTMLButtonElement && state.kind === "error") {
      retry.addEventListener("click", () => {
        void controller.submit(state.question);
      });
    }
  };

  const controller = new AskController(api, swapRegion);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void controller.submit(input.value);
  });

  resetButton.addEventListener("click", () => {
    controller.reset();
    input.value = "";
    input.focus();
  });

  void api
    .models()
    .then((models) => {
      for (const model of models) {
        const option = document.createElement("option");
        option.value = model;
        option.textContent = model;
        modelSelect.appendChild(option);
      }
    })
    .catch(() => {
      const option = document.createElement("option");
      option.value = "";
      option.textContent = "(models unavailable)";
      modelSelect.appendChild(option);
    });

  return { controller, root };
}

/** Submission lifecycle: one in-flight request, newest always wins. */

import { ApiClient, BadRequestError, isAbortError } from "./api";
import type { ViewState } from "./render";

export class AskController {
  private generation = 0;
  private aborter: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onState: (state: ViewState) => void,
  ) {}

  async submit(question: string): Promise<void> {
    const trimmed = question.trim();
    if (!trimmed) {
      this.onState({ kind: "invalid", message: "Please enter a question." });
      return;
    }
    const generation = ++this.generation;
    this.aborter?.abort();
    this.aborter = new AbortController();
    this.onState({ kind: "loading", question: trimmed });
    try {
      const response = await this.api.ask(
        { question: trimmed },
        this.aborter.signal,
      );
      if (generation !== this.generation) return; // a newer submit won
      this.onState(
        response.results.length > 0
          ? { kind: "results", question: trimmed, response }
          : { kind: "empty", question: trimmed },
      );
    } catch (error) {
      if (generation !== this.generation || isAbortError(error)) return;
      if (error instanceof BadRequestError) {
        this.onState({ kind: "invalid", message: error.message });
      } else {
        this.onState({
          kind: "error",
          question: trimmed,
          message: error instanceof Error ? error.message : String(error),
        });
      }
    }
  }

  /** Cancel any in-flight request and return to the blank state. */
  reset(): void {
    this.generation++;
    this.aborter?.abort();
    this.aborter = null;
    this.onState({ kind: "idle" });
  }
}

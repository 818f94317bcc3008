/** Typed client for the question-answering REST API. */

export interface AnswerPayload {
  text: string;
  /** Unicode scalar-value offsets into the snippet of the same result. */
  start: number;
  end: number;
}

export interface AskResult {
  position: number;
  url: string;
  title: string;
  snippet: string;
  answer: AnswerPayload | null;
  c: number;
  r: number;
  q: number;
}

export interface AskResponse {
  query_terms: string[];
  results: AskResult[];
}

export interface AskRequest {
  question: string;
  top_k?: number;
  query_mode?: "baseline" | "cw" | "cw-union";
}

/** The server rejected the request body (HTTP 400). */
export class BadRequestError extends Error {}

/** Any other non-OK response. */
export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async ask(request: AskRequest, signal?: AbortSignal): Promise<AskResponse> {
    const response = await fetch(`${this.baseUrl}/api/v1/ask`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    if (response.status === 400) {
      throw new BadRequestError(await describeError(response));
    }
    if (!response.ok) {
      throw new ApiError(response.status, await describeError(response));
    }
    return (await response.json()) as AskResponse;
  }

  async models(signal?: AbortSignal): Promise<string[]> {
    const response = await fetch(`${this.baseUrl}/api/v1/models`, { signal });
    if (!response.ok) {
      throw new ApiError(response.status, await describeError(response));
    }
    return (await response.json()) as string[];
  }
}

async function describeError(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return `HTTP ${response.status}`;
  }
}

export function isAbortError(error: unknown): boolean {
  return error instanceof DOMException && error.name === "AbortError";
}

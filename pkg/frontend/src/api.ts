/** Thin fetch client for the /v1 gateway API. */

import { ChatRequest, ChatResponse, HealthResponse, parseChatResponse, parseHealthResponse } from "./schema.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number | null, readonly retriable: boolean) {
    super(message);
  }
}

export interface ApiClient {
  chat(request: ChatRequest): Promise<ChatResponse>;
  health(): Promise<HealthResponse>;
}

type FetchLike = typeof fetch;

export function createApiClient(baseUrl = "", fetchImpl: FetchLike = fetch): ApiClient {
  const base = baseUrl.replace(/\/$/, "");

  async function post(path: string, body: unknown): Promise<unknown> {
    let response: Response;
    try {
      response = await fetchImpl(`${base}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`, null, true);
    }
    if (!response.ok) {
      // 5xx and 503-style failures are worth retrying; 4xx are not.
      throw new ApiError(`request failed with ${response.status}`, response.status, response.status >= 500);
    }
    return response.json();
  }

  return {
    async chat(request: ChatRequest): Promise<ChatResponse> {
      return parseChatResponse(await post("/v1/chat", request));
    },
    async health(): Promise<HealthResponse> {
      let response: Response;
      try {
        response = await fetchImpl(`${base}/v1/health`);
      } catch (err) {
        throw new ApiError(`network failure: ${String(err)}`, null, true);
      }
      if (!response.ok) throw new ApiError(`health check failed with ${response.status}`, response.status, true);
      return parseHealthResponse(await response.json());
    },
  };
}

/**
 * The /v1 wire contract, in one place.
 *
 * Types describe what the service sends; the guard functions validate raw
 * JSON at the boundary so a contract drift fails loudly (and the same guards
 * run in tests against recorded server fixtures).
 */

export const RESPONSE_KINDS = ["answers", "document_list", "clarification", "smalltalk"] as const;
export type ResponseKind = (typeof RESPONSE_KINDS)[number];

export interface ResponseItem {
  text: string;
  title: string | null;
}

export interface Diagnostics {
  [stage: string]: unknown;
}

export interface ChatResponse {
  kind: ResponseKind;
  items: ResponseItem[];
  session_id: string;
  diagnostics?: Diagnostics;
}

export interface HealthResponse {
  status: string;
  artifacts?: Record<string, string>;
}

export interface ChatRequest {
  text: string;
  session_id?: string;
}

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

export function isResponseItem(value: unknown): value is ResponseItem {
  if (!isObject(value)) return false;
  return typeof value.text === "string" && (value.title === null || typeof value.title === "string");
}

export function isResponseKind(value: unknown): value is ResponseKind {
  return typeof value === "string" && (RESPONSE_KINDS as readonly string[]).includes(value);
}

export function parseChatResponse(value: unknown): ChatResponse {
  if (!isObject(value)) throw new ContractError("chat response is not an object");
  if (!isResponseKind(value.kind)) throw new ContractError(`bad kind: ${String(value.kind)}`);
  if (!Array.isArray(value.items) || !value.items.every(isResponseItem)) {
    throw new ContractError("chat response items are malformed");
  }
  if (typeof value.session_id !== "string" || !value.session_id) {
    throw new ContractError("chat response lacks a session_id");
  }
  if (value.diagnostics !== undefined && !isObject(value.diagnostics)) {
    throw new ContractError("diagnostics must be an object when present");
  }
  return {
    kind: value.kind,
    items: value.items as ResponseItem[],
    session_id: value.session_id,
    diagnostics: value.diagnostics as Diagnostics | undefined,
  };
}

export function parseHealthResponse(value: unknown): HealthResponse {
  if (!isObject(value) || typeof value.status !== "string") {
    throw new ContractError("health response is malformed");
  }
  return value as unknown as HealthResponse;
}

export class ContractError extends Error {}

/**
 * Chat view state and its pure transitions.
 *
 * The message list is append-only and only ever grows through a completed
 * round trip: the in-flight user text lives in `pendingText` (rendered as an
 * optimistic bubble) and is committed together with the bot reply, so a
 * failed request leaves history exactly as it was.
 */

import { ChatResponse, Diagnostics, ResponseItem, ResponseKind } from "./schema.js";

export interface ChatMessage {
  speaker: "user" | "bot";
  kind: ResponseKind | "user";
  items: ResponseItem[];
  diagnostics?: Diagnostics;
}

export interface TurnError {
  text: string; // the turn that failed, offered for retry
  message: string;
  retriable: boolean;
}

export interface ChatViewState {
  sessionId: string | null;
  messages: ChatMessage[];
  pending: boolean;
  pendingText: string | null;
  lastError: TurnError | null;
  showDiagnostics: boolean;
  connected: boolean;
}

export function initialState(sessionId: string | null = null): ChatViewState {
  return {
    sessionId,
    messages: [],
    pending: false,
    pendingText: null,
    lastError: null,
    showDiagnostics: false,
    connected: false,
  };
}

export function canSend(state: ChatViewState, text: string): boolean {
  return !state.pending && text.trim().length > 0;
}

/** Start a turn: one in-flight request per session, non-empty text only. */
export function beginTurn(state: ChatViewState, text: string): ChatViewState {
  const trimmed = text.trim();
  if (!canSend(state, trimmed)) {
    throw new Error(state.pending ? "a request is already pending" : "cannot send empty text");
  }
  return { ...state, pending: true, pendingText: trimmed, lastError: null };
}

/** Commit a successful round trip: user turn + bot reply enter history. */
export function completeTurn(state: ChatViewState, response: ChatResponse): ChatViewState {
  if (!state.pending || state.pendingText === null) {
    throw new Error("no pending turn to complete");
  }
  const userMessage: ChatMessage = {
    speaker: "user",
    kind: "user",
    items: [{ text: state.pendingText, title: null }],
  };
  const botMessage: ChatMessage = {
    speaker: "bot",
    kind: response.kind,
    items: response.items,
    diagnostics: response.diagnostics,
  };
  return {
    ...state,
    sessionId: response.session_id,
    messages: [...state.messages, userMessage, botMessage],
    pending: false,
    pendingText: null,
    lastError: null,
  };
}

/** A failed request: history untouched, the turn becomes a retriable error. */
export function failTurn(state: ChatViewState, message: string, retriable: boolean): ChatViewState {
  if (!state.pending || state.pendingText === null) {
    throw new Error("no pending turn to fail");
  }
  return {
    ...state,
    pending: false,
    pendingText: null,
    lastError: { text: state.pendingText, message, retriable },
  };
}

export function toggleDiagnostics(state: ChatViewState): ChatViewState {
  return { ...state, showDiagnostics: !state.showDiagnostics };
}

export function setConnected(state: ChatViewState, connected: boolean): ChatViewState {
  return { ...state, connected };
}

/** Browser entry point: wires state, rendering, and the API client together. */

import { ApiError, createApiClient } from "./api.js";
import { mount } from "./dom.js";
import { renderApp } from "./render.js";
import { loadSession, saveSession } from "./session.js";
import {
  ChatViewState,
  beginTurn,
  canSend,
  completeTurn,
  failTurn,
  initialState,
  setConnected,
  toggleDiagnostics,
} from "./state.js";

const SESSION_TTL_SECONDS = 3600;

function start(): void {
  const root = document.getElementById("chat-root");
  const input = document.getElementById("chat-input") as HTMLInputElement | null;
  const sendButton = document.getElementById("chat-send") as HTMLButtonElement | null;
  if (!root || !input || !sendButton) throw new Error("chat scaffold missing from page");

  const api = createApiClient("");
  let state: ChatViewState = initialState(loadSession(window.localStorage));

  function update(next: ChatViewState): void {
    state = next;
    mount(root!, renderApp(state));
    sendButton!.disabled = !canSend(state, input!.value);
  }

  async function send(text: string): Promise<void> {
    if (!canSend(state, text)) return;
    update(beginTurn(state, text));
    input!.value = "";
    try {
      const response = await api.chat(
        state.sessionId ? { text, session_id: state.sessionId } : { text },
      );
      saveSession(window.localStorage, response.session_id, SESSION_TTL_SECONDS);
      update(completeTurn(state, response));
    } catch (err) {
      const apiErr = err instanceof ApiError ? err : new ApiError(String(err), null, false);
      update(failTurn(state, apiErr.message, apiErr.retriable));
    }
  }

  sendButton.addEventListener("click", () => void send(input.value));
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") void send(input.value);
  });
  input.addEventListener("input", () => {
    sendButton.disabled = !canSend(state, input.value);
  });

  // Clicking a paper title drafts a follow-up; the user confirms before send.
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const action = target.getAttribute("data-action");
    if (action === "title" && target.getAttribute("data-title")) {
      input.value = `tell me more about ${target.getAttribute("data-title")}`;
      input.focus();
      sendButton.disabled = !canSend(state, input.value);
    } else if (action === "retry" && target.getAttribute("data-text")) {
      void send(target.getAttribute("data-text")!);
    } else if (action === "toggle-trace") {
      update(toggleDiagnostics(state));
    }
  });

  update(state);
  api
    .health()
    .then(() => update(setConnected(state, true)))
    .catch(() => update(setConnected(state, false)));
}

document.addEventListener("DOMContentLoaded", start);

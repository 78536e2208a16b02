/**
 * Pure rendering: ChatViewState in, a VNode tree out.
 *
 * No DOM access here; `dom.ts` materializes the tree in the browser and the
 * tests assert on the structure directly. Replaying the same state always
 * yields an identical tree.
 */

import { ChatMessage, ChatViewState } from "./state.js";

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
}

export function h(tag: string, attrs: Record<string, string> = {}, ...children: (VNode | string)[]): VNode {
  return { tag, attrs, children };
}

const DOCUMENT_LIST_HEADER = "These papers may help:";

function renderTrace(diagnostics: unknown): VNode {
  return h("pre", { class: "trace" }, JSON.stringify(diagnostics, null, 2));
}

function renderBotMessage(message: ChatMessage, showDiagnostics: boolean): VNode {
  const body: (VNode | string)[] = [];
  if (message.kind === "answers") {
    body.push(
      h(
        "ol",
        { class: "answers" },
        ...message.items.map((item) =>
          h(
            "li",
            { class: "answer" },
            h("span", { class: "answer-text" }, item.text),
            h(
              "button",
              { class: "paper-title", "data-action": "title", "data-title": item.title ?? "" },
              item.title ?? "",
            ),
          ),
        ),
      ),
    );
  } else if (message.kind === "document_list") {
    body.push(h("div", { class: "doclist-header" }, DOCUMENT_LIST_HEADER));
    body.push(
      h(
        "ol",
        { class: "doclist" },
        ...message.items.map((item) =>
          h(
            "li",
            { class: "doc" },
            h(
              "button",
              { class: "paper-title", "data-action": "title", "data-title": item.title ?? item.text },
              item.title ?? item.text,
            ),
          ),
        ),
      ),
    );
  } else {
    // clarification and smalltalk are plain bubbles
    body.push(h("span", { class: "plain" }, message.items[0]?.text ?? ""));
  }
  if (showDiagnostics && message.diagnostics !== undefined) {
    body.push(renderTrace(message.diagnostics));
  }
  return h("div", { class: `message bot kind-${message.kind}` }, ...body);
}

function renderUserMessage(message: ChatMessage): VNode {
  return h("div", { class: "message user" }, h("span", { class: "plain" }, message.items[0]?.text ?? ""));
}

export function renderMessages(state: ChatViewState): VNode {
  const children: VNode[] = state.messages.map((message) =>
    message.speaker === "user" ? renderUserMessage(message) : renderBotMessage(message, state.showDiagnostics),
  );
  if (state.pendingText !== null) {
    children.push(
      h("div", { class: "message user optimistic" }, h("span", { class: "plain" }, state.pendingText)),
    );
    children.push(h("div", { class: "message bot thinking" }, "…"));
  }
  if (state.lastError !== null) {
    children.push(
      h(
        "div",
        { class: "message error" },
        h("span", { class: "plain" }, `Could not send: ${state.lastError.message}`),
        ...(state.lastError.retriable
          ? [h("button", { class: "retry", "data-action": "retry", "data-text": state.lastError.text }, "Retry")]
          : []),
      ),
    );
  }
  return h("div", { class: "messages" }, ...children);
}

export function renderControls(state: ChatViewState): VNode {
  const anyTrace = state.messages.some((m) => m.diagnostics !== undefined);
  const children: VNode[] = [
    h("span", { class: `status ${state.connected ? "ok" : "down"}` }, state.connected ? "connected" : "offline"),
  ];
  if (anyTrace) {
    children.push(
      h(
        "button",
        { class: "toggle-trace", "data-action": "toggle-trace" },
        state.showDiagnostics ? "Hide diagnostics" : "Show diagnostics",
      ),
    );
  }
  return h("div", { class: "controls" }, ...children);
}

export function renderApp(state: ChatViewState): VNode {
  return h("div", { class: "chat-app" }, renderControls(state), renderMessages(state));
}

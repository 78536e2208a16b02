/** Contract tests: the recorded /v1 fixtures must satisfy the shared schema. */

import { describe, expect, it } from "vitest";

import answers from "../fixtures/chat_answers.json";
import clarification from "../fixtures/chat_clarification.json";
import doclist from "../fixtures/chat_doclist.json";
import smalltalk from "../fixtures/chat_smalltalk.json";
import health from "../fixtures/health.json";
import { ContractError, parseChatResponse, parseHealthResponse } from "../src/schema";

const recorded = { answers, document_list: doclist, clarification, smalltalk };

describe("recorded chat fixtures", () => {
  it("cover all four response kinds", () => {
    const kinds = Object.values(recorded).map((fixture) => parseChatResponse(fixture).kind);
    expect(new Set(kinds)).toEqual(new Set(["answers", "document_list", "clarification", "smalltalk"]));
  });

  it("every fixture parses with a session id and items", () => {
    for (const fixture of Object.values(recorded)) {
      const parsed = parseChatResponse(fixture);
      expect(parsed.session_id.length).toBeGreaterThan(0);
      expect(parsed.items.length).toBeGreaterThan(0);
    }
  });

  it("answers fixture carries a paper title on every item", () => {
    const parsed = parseChatResponse(answers);
    expect(parsed.kind).toBe("answers");
    for (const item of parsed.items) {
      expect(item.title).toBeTruthy();
    }
  });

  it("clarification fixture is a single prompt", () => {
    const parsed = parseChatResponse(clarification);
    expect(parsed.items).toHaveLength(1);
    expect(parsed.items[0].title).toBeNull();
  });

  it("fixtures recorded in debug mode include a diagnostics trace", () => {
    const parsed = parseChatResponse(answers);
    expect(parsed.diagnostics).toBeDefined();
    expect(parsed.diagnostics).toHaveProperty("nlu");
  });

  it("health fixture parses", () => {
    const parsed = parseHealthResponse(health);
    expect(parsed.status).toBe("ok");
    expect(Object.keys(parsed.artifacts ?? {})).toContain("index.bin");
  });
});

describe("schema rejections", () => {
  it("rejects unknown kinds", () => {
    expect(() => parseChatResponse({ ...answers, kind: "surprise" })).toThrow(ContractError);
  });

  it("rejects missing session id", () => {
    const { session_id: _dropped, ...rest } = answers as Record<string, unknown>;
    expect(() => parseChatResponse(rest)).toThrow(ContractError);
  });

  it("rejects malformed items", () => {
    expect(() => parseChatResponse({ ...answers, items: [{ text: 5 }] })).toThrow(ContractError);
  });

  it("rejects non-object payloads", () => {
    expect(() => parseChatResponse("nope")).toThrow(ContractError);
    expect(() => parseHealthResponse(null)).toThrow(ContractError);
  });
});

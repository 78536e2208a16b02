import { describe, expect, it } from "vitest";

import answers from "../fixtures/chat_answers.json";
import health from "../fixtures/health.json";
import { ApiError, createApiClient } from "../src/api";
import { ContractError } from "../src/schema";

function fetchReturning(status: number, body: unknown): typeof fetch {
  return async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
}

const failingFetch: typeof fetch = async () => {
  throw new TypeError("fetch failed");
};

describe("chat client", () => {
  it("parses a recorded response and sends the session id", async () => {
    let captured: { url: string; body: unknown } | null = null;
    const spyFetch: typeof fetch = async (url, init) => {
      captured = { url: String(url), body: JSON.parse(String(init?.body)) };
      return new Response(JSON.stringify(answers), { status: 200 });
    };
    const client = createApiClient("http://svc", spyFetch);
    const response = await client.chat({ text: "q", session_id: "s1" });
    expect(response.kind).toBe("answers");
    expect(captured!.url).toBe("http://svc/v1/chat");
    expect(captured!.body).toEqual({ text: "q", session_id: "s1" });
  });

  it("5xx failures are retriable", async () => {
    const client = createApiClient("", fetchReturning(503, { detail: "artifacts not loaded" }));
    await expect(client.chat({ text: "q" })).rejects.toMatchObject({ status: 503, retriable: true });
  });

  it("4xx failures are not retriable", async () => {
    const client = createApiClient("", fetchReturning(404, { detail: "unknown session" }));
    await expect(client.chat({ text: "q", session_id: "ghost" })).rejects.toMatchObject({
      status: 404,
      retriable: false,
    });
  });

  it("network failures are retriable", async () => {
    const client = createApiClient("", failingFetch);
    const failure = await client.chat({ text: "q" }).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.retriable).toBe(true);
    expect(failure.status).toBeNull();
  });

  it("contract drift surfaces as ContractError", async () => {
    const client = createApiClient("", fetchReturning(200, { kind: "answers" }));
    await expect(client.chat({ text: "q" })).rejects.toBeInstanceOf(ContractError);
  });
});

describe("health client", () => {
  it("parses the recorded fixture", async () => {
    const client = createApiClient("", fetchReturning(200, health));
    expect((await client.health()).status).toBe("ok");
  });

  it("unavailable service raises a retriable error", async () => {
    const client = createApiClient("", fetchReturning(503, { status: "unavailable" }));
    await expect(client.health()).rejects.toMatchObject({ retriable: true });
  });
});

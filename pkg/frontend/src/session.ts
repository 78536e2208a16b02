/** Session id persistence in browser storage, with client-side expiry. */

const STORAGE_KEY = "litmine.session";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

interface StoredSession {
  sessionId: string;
  expiresAt: number; // epoch ms
}

export function saveSession(storage: StorageLike, sessionId: string, ttlSeconds: number, now = Date.now()): void {
  const record: StoredSession = { sessionId, expiresAt: now + ttlSeconds * 1000 };
  storage.setItem(STORAGE_KEY, JSON.stringify(record));
}

/** Returns the stored session id, or null (and clears it) once expired. */
export function loadSession(storage: StorageLike, now = Date.now()): string | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw === null) return null;
  try {
    const record = JSON.parse(raw) as StoredSession;
    if (typeof record.sessionId !== "string" || typeof record.expiresAt !== "number") throw new Error("bad record");
    if (now >= record.expiresAt) {
      storage.removeItem(STORAGE_KEY);
      return null;
    }
    return record.sessionId;
  } catch {
    storage.removeItem(STORAGE_KEY);
    return null;
  }
}

export function clearSession(storage: StorageLike): void {
  storage.removeItem(STORAGE_KEY);
}

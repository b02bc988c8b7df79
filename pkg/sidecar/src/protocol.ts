/**
 * Wire protocol: one JSON object per line.
 *
 *   request   {"id": int, "texts": [string, ...]}
 *   response  {"id": int, "vectors": [[number, ...], ...], "dim": int}
 *   error     {"id": int, "error": string}   (id -1 when unparseable)
 */

export interface EmbedRequest {
  id: number;
  texts: string[];
}

export interface EmbedResponse {
  id: number;
  vectors: number[][];
  dim: number;
}

export interface ErrorResponse {
  id: number;
  error: string;
}

export class ProtocolError extends Error {}

/** Extracts a usable id for error reporting, even from invalid requests. */
export function peekId(raw: unknown): number {
  if (
    typeof raw === "object" &&
    raw !== null &&
    "id" in raw &&
    typeof (raw as { id: unknown }).id === "number" &&
    Number.isInteger((raw as { id: number }).id)
  ) {
    return (raw as { id: number }).id;
  }
  return -1;
}

export function parseRequest(raw: unknown): EmbedRequest {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("request must be a JSON object");
  }
  const record = raw as Record<string, unknown>;
  if (typeof record.id !== "number" || !Number.isInteger(record.id)) {
    throw new ProtocolError('"id" must be an integer');
  }
  if (!Array.isArray(record.texts) || record.texts.some((t) => typeof t !== "string")) {
    throw new ProtocolError('"texts" must be an array of strings');
  }
  return { id: record.id, texts: record.texts as string[] };
}

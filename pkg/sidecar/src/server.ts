/**
 * Request loop shared by the stdio and TCP transports.
 *
 * Every input line yields exactly one output line, in order; a bad line
 * produces an error response and never terminates the service.
 */

import { createInterface } from "node:readline";
import { createServer, type Server, type Socket } from "node:net";

import type { Encoder } from "./encoder.js";
import { parseRequest, peekId } from "./protocol.js";

export interface ServerConfig {
  dim: number;
  /** Internal encoding chunk; throughput knob only, responses are whole. */
  batch: number;
}

export function handleLine(line: string, encoder: Encoder, config: ServerConfig): string {
  let id = -1;
  try {
    const raw: unknown = JSON.parse(line);
    id = peekId(raw);
    const request = parseRequest(raw);
    const vectors: number[][] = [];
    for (let start = 0; start < request.texts.length; start += config.batch) {
      vectors.push(...encoder.encode(request.texts.slice(start, start + config.batch), config.dim));
    }
    return JSON.stringify({ id: request.id, vectors, dim: config.dim });
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return JSON.stringify({ id, error: message });
  }
}

export function serveStdio(encoder: Encoder, config: ServerConfig): Promise<void> {
  const rl = createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    if (line.trim().length === 0) return;
    process.stdout.write(handleLine(line, encoder, config) + "\n");
  });
  return new Promise((resolve) => rl.on("close", () => resolve()));
}

export function serveTcp(encoder: Encoder, config: ServerConfig, port: number): Server {
  const server = createServer((socket: Socket) => {
    let buffer = "";
    socket.on("data", (data) => {
      buffer += data.toString("utf8");
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline);
        buffer = buffer.slice(newline + 1);
        if (line.trim().length === 0) continue;
        socket.write(handleLine(line, encoder, config) + "\n");
      }
    });
    socket.on("error", () => socket.destroy());
  });
  server.listen(port, "127.0.0.1");
  return server;
}

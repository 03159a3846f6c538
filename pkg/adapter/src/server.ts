/**
 * Request loop for the scoring protocol: answers hello and predict messages,
 * replies to malformed lines with an error message and keeps the session
 * alive. Works over any Readable/Writable pair (stdio pipes) or a TCP socket.
 */

import * as net from "node:net";
import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";
import type { Reply, Session } from "./protocol";

export function handleLine(session: Session, line: string): Reply | null {
  const trimmed = line.trim();
  if (trimmed === "") return null;

  let message: unknown;
  try {
    message = JSON.parse(trimmed);
  } catch {
    return { op: "error", id: null, message: `invalid JSON: ${trimmed.slice(0, 80)}` };
  }
  if (typeof message !== "object" || message === null || !("op" in message)) {
    return { op: "error", id: null, message: "message must be an object with an op" };
  }
  const request = message as { op: unknown; id?: unknown; texts?: unknown };
  const id = typeof request.id === "number" ? request.id : null;

  if (request.op === "hello") {
    return { op: "hello", labels: session.labels };
  }
  if (request.op === "predict") {
    if (id === null) {
      return { op: "error", id: null, message: "predict needs a numeric id" };
    }
    if (!Array.isArray(request.texts)) {
      return { op: "error", id, message: "predict needs a texts array" };
    }
    const scores: number[][] = [];
    for (const text of request.texts) {
      if (!Array.isArray(text) || !text.every((t) => typeof t === "string")) {
        return { op: "error", id, message: "each text must be an array of strings" };
      }
      scores.push(session.scorer(text));
    }
    return { op: "scores", id, scores };
  }
  return { op: "error", id, message: `unknown op: ${String(request.op)}` };
}

export function serveStream(
  input: Readable,
  output: Writable,
  session: Session
): Promise<void> {
  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  return new Promise((resolve) => {
    lines.on("line", (line) => {
      const reply = handleLine(session, line);
      if (reply !== null) {
        output.write(JSON.stringify(reply) + "\n");
      }
    });
    lines.on("close", resolve);
  });
}

export function serveTcp(port: number, session: Session): net.Server {
  const server = net.createServer((socket) => {
    void serveStream(socket, socket, session);
  });
  server.listen(port);
  return server;
}

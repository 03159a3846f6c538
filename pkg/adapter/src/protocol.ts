/** Wire messages: one JSON object per line, UTF-8, replies matched by id. */

export interface HelloReply {
  op: "hello";
  labels: string[];
}

export interface ScoresReply {
  op: "scores";
  id: number;
  scores: number[][];
}

export interface ErrorReply {
  op: "error";
  id: number | null;
  message: string;
}

export type Reply = HelloReply | ScoresReply | ErrorReply;

/** Maps one token sequence to a probability vector (must sum to 1). */
export type Scorer = (tokens: string[]) => number[];

export interface Session {
  labels: string[];
  scorer: Scorer;
}

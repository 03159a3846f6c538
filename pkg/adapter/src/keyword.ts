/**
 * Deterministic keyword-count demo classifier.
 *
 * Laplace-smoothed ratio of positive keyword hits; arithmetic must stay
 * identical to the toolkit's in-process test reimplementation so wire and
 * in-process verdicts agree bit for bit.
 */

import type { Session } from "./protocol";

const POSITIVE_WORDS = new Set([
  "good",
  "great",
  "fine",
  "nice",
  "superb",
  "happy",
  "excellent",
]);

const NEGATIVE_WORDS = new Set([
  "bad",
  "poor",
  "awful",
  "terrible",
  "sad",
  "horrible",
  "dreadful",
]);

export function keywordScores(tokens: string[]): number[] {
  let pos = 0;
  let neg = 0;
  for (const token of tokens) {
    if (POSITIVE_WORDS.has(token)) pos += 1;
    if (NEGATIVE_WORDS.has(token)) neg += 1;
  }
  const pPos = (1 + pos) / (2 + pos + neg);
  return [1 - pPos, pPos];
}

export function keywordSession(): Session {
  return { labels: ["negative", "positive"], scorer: keywordScores };
}

/** Stable hash of an effective assignment, used to label runs for audit. */

import type { AssignmentEntry } from './types.js';
import { outcomeKey } from './types.js';

/** FNV-1a over the canonical row serialization, rendered as 8 hex chars. */
export function assignmentHash(entries: AssignmentEntry[]): string {
  const canonical = [...entries]
    .map((e) => `${e.from_state_id}|${outcomeKey(e)}=${e.probability.toPrecision(17)}`)
    .sort()
    .join('\n');
  let hash = 0x811c9dc5;
  for (let i = 0; i < canonical.length; i++) {
    hash ^= canonical.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, '0');
}

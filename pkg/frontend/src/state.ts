/**
 * Selection state and stale-response protection.
 *
 * The UI plans again on every selection change; responses can come back
 * out of order, so each request takes a token from a Sequencer and only
 * the response holding the latest token may touch the DOM.
 */

import { tableOf } from './chains.js';

/** Hands out monotonically increasing tokens; only the newest is current. */
export class Sequencer {
  private latest = 0;

  next(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(token: number): boolean {
    return token === this.latest;
  }
}

/** Ordered set of selected `table.column` references. */
export class Selection {
  private readonly refs: string[] = [];

  /** Adds or removes one column reference, preserving first-click order. */
  toggle(ref: string, selected: boolean): void {
    const index = this.refs.indexOf(ref);
    if (selected && index === -1) {
      this.refs.push(ref);
    } else if (!selected && index !== -1) {
      this.refs.splice(index, 1);
    }
  }

  get columns(): string[] {
    return [...this.refs];
  }

  /** Target tables derived from the selection, first appearance first. */
  get targets(): string[] {
    const seen = new Set<string>();
    const tables: string[] = [];
    for (const ref of this.refs) {
      const table = tableOf(ref);
      if (!seen.has(table)) {
        seen.add(table);
        tables.push(table);
      }
    }
    return tables;
  }

  get isEmpty(): boolean {
    return this.refs.length === 0;
  }

  clear(): void {
    this.refs.length = 0;
  }
}

/**
 * Arrow-chain rendering for join sequences.
 *
 * A sequence's steps are already ordered so that every step starts from a
 * table that is part of the query. Consecutive steps that continue from
 * the previous step's destination fold into one chain; a step that starts
 * from an earlier table opens a new chain. The six-table worked example
 * renders as three chains: ORS→ORD→CU / ORS→PR→SU / PR→CA.
 */

import type { PlanSequence, PlanStep } from './api.js';

/** Maps a table name to its display label (alias when one exists). */
export type TableLabeler = (table: string) => string;

/** The table part of a qualified `table.column` reference. */
export function tableOf(ref: string): string {
  const dot = ref.indexOf('.');
  return dot === -1 ? ref : ref.slice(0, dot);
}

/** Splits a sequence's steps into maximal from→to→... table chains. */
export function sequenceChains(sequence: PlanSequence): string[][] {
  if (sequence.steps.length === 0) {
    return [[sequence.origin]];
  }
  const chains: string[][] = [];
  let current: string[] = [];
  for (const step of sequence.steps) {
    const from = tableOf(step.from);
    const to = tableOf(step.to);
    if (current.length === 0 || current[current.length - 1] !== from) {
      if (current.length > 0) {
        chains.push(current);
      }
      current = [from, to];
    } else {
      current.push(to);
    }
  }
  chains.push(current);
  return chains;
}

/** Formats a sequence as `A→B→C / A→D` using the given table labels. */
export function formatSequence(
  sequence: PlanSequence,
  label: TableLabeler = (table) => table,
): string {
  return sequenceChains(sequence)
    .map((chain) => chain.map(label).join('→'))
    .join(' / ');
}

/** Formats one step as `table.column → table.column [link]`. */
export function formatStep(step: PlanStep): string {
  return `${step.from} → ${step.to} [${step.link_id}]`;
}

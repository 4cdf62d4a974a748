// Moderator's discrimination board: the merged discrepancy list grouped
// by scenario and step, a defect / false-positive toggle per distinct
// item, duplicate linking, and a submit gate that stays closed until
// every non-duplicate item has a decision.

import type { Classification, Collection, Discrepancy } from './types.js';

export interface BoardItem {
  discrepancy: Discrepancy;
  isDuplicate: boolean;
  duplicateOf: string | null;
  decision: Classification | null;
  linkTargets: string[]; // earlier root ids this item could be linked to
}

export interface BoardGroup {
  key: string;   // "SC01 / main step 2" or "SC01 / line 14"
  items: BoardItem[];
}

export interface BoardViewModel {
  collectionId: string;
  artifactId: string;
  total: number;
  distinct: number;
  decided: number;
  groups: BoardGroup[];
  submitEnabled: boolean;
  discriminated: boolean;
  realDefects: number | null;
}

export function locationKey(d: Discrepancy): string {
  if (d.location.kind === 'step') {
    const flow = d.location.flow_label === '' ? 'main' : d.location.flow_label;
    return `${d.scenario_id} / ${flow} step ${d.location.step_number}`;
  }
  return `${d.scenario_id} / line ${d.location.line}`;
}

export function buildBoardViewModel(collection: Collection,
                                    decisions: Record<string, Classification>):
    BoardViewModel {
  const order = collection.discrepancies.map((d) => d.discrepancy_id);
  const groups = new Map<string, BoardItem[]>();
  for (const d of collection.discrepancies) {
    const isDuplicate = d.duplicate_of !== null;
    const earlierRoots = collection.discrepancies
      .filter((other) => other.duplicate_of === null
        && other.discrepancy_id !== d.discrepancy_id
        && order.indexOf(other.discrepancy_id) < order.indexOf(d.discrepancy_id))
      .map((other) => other.discrepancy_id);
    const item: BoardItem = {
      discrepancy: d,
      isDuplicate,
      duplicateOf: d.duplicate_of,
      decision: d.classification ?? decisions[d.discrepancy_id] ?? null,
      linkTargets: isDuplicate ? [] : earlierRoots,
    };
    const key = locationKey(d);
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(item);
    } else {
      groups.set(key, [item]);
    }
  }
  const roots = collection.discrepancies.filter((d) => d.duplicate_of === null);
  const decided = roots.filter(
    (d) => d.classification !== null || d.discrepancy_id in decisions).length;
  return {
    collectionId: collection.collection_id,
    artifactId: collection.artifact_id,
    total: collection.total,
    distinct: collection.distinct,
    decided,
    groups: [...groups.entries()].map(([key, items]) => ({ key, items })),
    submitEnabled: !collection.discriminated && decided === roots.length && roots.length > 0,
    discriminated: collection.discriminated,
    realDefects: collection.real_defects ?? null,
  };
}

export function toggleDecision(decisions: Record<string, Classification>,
                               discrepancyId: string,
                               decision: Classification): Record<string, Classification> {
  const next = { ...decisions };
  if (next[discrepancyId] === decision) {
    delete next[discrepancyId];
  } else {
    next[discrepancyId] = decision;
  }
  return next;
}

// Decisions for items that became duplicates after linking must not be
// submitted (the root inherits); prune them before the API call.
export function submittableDecisions(collection: Collection,
                                     decisions: Record<string, Classification>):
    Record<string, Classification> {
  const roots = new Set(collection.discrepancies
    .filter((d) => d.duplicate_of === null)
    .map((d) => d.discrepancy_id));
  const out: Record<string, Classification> = {};
  for (const [id, decision] of Object.entries(decisions)) {
    if (roots.has(id)) out[id] = decision;
  }
  return out;
}

import { describe, expect, it } from 'vitest';

import {
  buildBoardViewModel,
  locationKey,
  submittableDecisions,
  toggleDecision,
} from '../src/discriminationBoard.js';
import type { Collection, Discrepancy } from '../src/types.js';

function discrepancy(id: string, step: number, overrides: Partial<Discrepancy> = {}): Discrepancy {
  return {
    discrepancy_id: id,
    session_id: 'S001',
    scenario_id: 'SC01',
    location: { kind: 'step', flow_label: '', step_number: step },
    description: `issue ${id}`,
    defect_type: 'omission',
    origin: 'human',
    question_id: null,
    duplicate_of: null,
    classification: null,
    ...overrides,
  };
}

function collection(discrepancies: Discrepancy[],
                    overrides: Partial<Collection> = {}): Collection {
  const distinct = discrepancies.filter((d) => d.duplicate_of === null).length;
  return {
    collection_id: 'C001',
    artifact_id: 'greenhouse',
    session_ids: ['S001'],
    discrepancies,
    total: discrepancies.length,
    distinct,
    discriminated: false,
    ...overrides,
  };
}

describe('grouping', () => {
  it('groups by scenario and step', () => {
    const view = buildBoardViewModel(collection([
      discrepancy('D1', 2),
      discrepancy('D2', 2),
      discrepancy('D3', 5),
    ]), {});
    expect(view.groups.map((g) => g.key)).toEqual([
      'SC01 / main step 2', 'SC01 / main step 5']);
    expect(view.groups[0].items).toHaveLength(2);
  });

  it('line locations get their own keys', () => {
    const d = discrepancy('D1', 0, {
      location: { kind: 'line', line: 14, column: 6 },
    });
    expect(locationKey(d)).toBe('SC01 / line 14');
  });
});

describe('submit gating', () => {
  it('submission stays disabled until every non-duplicate has a decision', () => {
    const items = [discrepancy('D1', 1), discrepancy('D2', 2),
                   discrepancy('D3', 3, { duplicate_of: 'D1' })];
    let decisions = {};
    let view = buildBoardViewModel(collection(items), decisions);
    expect(view.submitEnabled).toBe(false);

    decisions = toggleDecision(decisions, 'D1', 'defect');
    view = buildBoardViewModel(collection(items), decisions);
    expect(view.submitEnabled).toBe(false); // D2 still undecided; D3 inherits

    decisions = toggleDecision(decisions, 'D2', 'false_positive');
    view = buildBoardViewModel(collection(items), decisions);
    expect(view.submitEnabled).toBe(true);
    expect(view.decided).toBe(2);
  });

  it('toggling the same decision twice clears it', () => {
    let decisions = toggleDecision({}, 'D1', 'defect');
    expect(decisions.D1).toBe('defect');
    decisions = toggleDecision(decisions, 'D1', 'defect');
    expect('D1' in decisions).toBe(false);
  });

  it('a discriminated collection is read-only', () => {
    const items = [discrepancy('D1', 1, { classification: 'defect' })];
    const view = buildBoardViewModel(
      collection(items, { discriminated: true, real_defects: 1 }), {});
    expect(view.submitEnabled).toBe(false);
    expect(view.realDefects).toBe(1);
  });
});

describe('duplicate links', () => {
  it('duplicates offer no decision and no link targets', () => {
    const items = [discrepancy('D1', 1), discrepancy('D2', 1, { duplicate_of: 'D1' })];
    const view = buildBoardViewModel(collection(items), {});
    const dup = view.groups[0].items[1];
    expect(dup.isDuplicate).toBe(true);
    expect(dup.linkTargets).toEqual([]);
  });

  it('link targets are earlier roots only', () => {
    const items = [discrepancy('D1', 1), discrepancy('D2', 2),
                   discrepancy('D3', 3)];
    const view = buildBoardViewModel(collection(items), {});
    const last = view.groups[2].items[0];
    expect(last.linkTargets).toEqual(['D1', 'D2']);
  });

  it('decisions for items that became duplicates are pruned before submit', () => {
    const items = [discrepancy('D1', 1), discrepancy('D2', 2, { duplicate_of: 'D1' })];
    const pruned = submittableDecisions(collection(items), {
      D1: 'defect', D2: 'false_positive',
    });
    expect(pruned).toEqual({ D1: 'defect' });
  });
});

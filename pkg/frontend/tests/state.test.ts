import { describe, expect, it } from 'vitest';

import { Selection, Sequencer } from '../src/state.js';

describe('Sequencer', () => {
  it('treats only the newest token as current', () => {
    const sequencer = new Sequencer();
    const first = sequencer.next();
    const second = sequencer.next();
    expect(sequencer.isCurrent(first)).toBe(false);
    expect(sequencer.isCurrent(second)).toBe(true);
  });
});

describe('Selection', () => {
  it('derives target tables in first-click order without duplicates', () => {
    const selection = new Selection();
    selection.toggle('customers.companyName', true);
    selection.toggle('suppliers.companyName', true);
    selection.toggle('customers.city', true);
    selection.toggle('categories.categoryName', true);
    expect(selection.targets).toEqual(['customers', 'suppliers', 'categories']);
  });

  it('removes a deselected column', () => {
    const selection = new Selection();
    selection.toggle('orders.orderID', true);
    selection.toggle('customers.city', true);
    selection.toggle('orders.orderID', false);
    expect(selection.columns).toEqual(['customers.city']);
    expect(selection.targets).toEqual(['customers']);
  });

  it('ignores a repeated select or deselect', () => {
    const selection = new Selection();
    selection.toggle('orders.orderID', true);
    selection.toggle('orders.orderID', true);
    selection.toggle('customers.city', false);
    expect(selection.columns).toEqual(['orders.orderID']);
  });

  it('reports emptiness and clears', () => {
    const selection = new Selection();
    expect(selection.isEmpty).toBe(true);
    selection.toggle('orders.orderID', true);
    expect(selection.isEmpty).toBe(false);
    selection.clear();
    expect(selection.isEmpty).toBe(true);
  });
});

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { debounce } from '../src/debounce.js';

describe('debounce', () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it('runs once after the quiet period', () => {
    const calls: number[] = [];
    const fn = debounce((value: number) => calls.push(value), 100);
    fn(1);
    fn(2);
    fn(3);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(100);
    expect(calls).toEqual([3]);
  });

  it('restarts the quiet period on every call', () => {
    const calls: string[] = [];
    const fn = debounce((value: string) => calls.push(value), 100);
    fn('a');
    vi.advanceTimersByTime(60);
    fn('b');
    vi.advanceTimersByTime(60);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(40);
    expect(calls).toEqual(['b']);
  });

  it('fires again for calls after a flush', () => {
    const calls: number[] = [];
    const fn = debounce((value: number) => calls.push(value), 50);
    fn(1);
    vi.advanceTimersByTime(50);
    fn(2);
    vi.advanceTimersByTime(50);
    expect(calls).toEqual([1, 2]);
  });
});

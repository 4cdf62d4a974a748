// Number and time formatting. formatMetric must stay byte-compatible
// with the server's CSV cells (3 decimals, half-up, blank when
// undefined) -- the dashboard displays server-formatted strings and the
// tests cross-check this implementation against them.

export function formatMetric(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return '';
  const sign = value < 0 ? '-' : '';
  // scale to thousandths with an epsilon so exact .0005 ties round up
  const millis = Math.floor(Math.abs(value) * 1000 + 0.5 + 1e-9);
  const whole = Math.floor(millis / 1000);
  const frac = (millis % 1000).toString().padStart(3, '0');
  return `${sign}${whole}.${frac}`;
}

export function formatElapsed(totalSeconds: number): string {
  const seconds = Math.max(0, Math.floor(totalSeconds));
  const h = Math.floor(seconds / 3600);
  const m = Math.floor((seconds % 3600) / 60);
  const s = seconds % 60;
  const mm = m.toString().padStart(2, '0');
  const ss = s.toString().padStart(2, '0');
  return h > 0 ? `${h}:${mm}:${ss}` : `${m}:${ss}`;
}

// Server-reported elapsed time plus local drift while the timer runs;
// mirrors the server within one second between syncs.
export function liveElapsedSeconds(
  serverElapsedSeconds: number,
  timerRunning: boolean,
  syncedAtMs: number,
  nowMs: number,
): number {
  if (!timerRunning) return serverElapsedSeconds;
  return serverElapsedSeconds + Math.floor(Math.max(0, nowMs - syncedAtMs) / 1000);
}

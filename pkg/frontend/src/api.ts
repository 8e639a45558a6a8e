/** Thin fetch wrapper over the monitor-service HTTP API. */

import type { FinalReport, ReportRow, SeriesMap, SessionInfo, TripInfo, UiState } from './types.js';

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export const api = {
  listTrips: () => request<{ trips: TripInfo[] }>('/trips'),

  report: (tripId: string) => request<{ rows: ReportRow[] }>(`/trips/${tripId}/report`),

  series: (tripId: string, streams: string[], maxPoints = 2000) =>
    request<{ series: SeriesMap }>(
      `/trips/${tripId}/series?streams=${encodeURIComponent(streams.join(','))}&max_points=${maxPoints}`,
    ),

  startLive: (profile: string, rate = 1.0) =>
    request<SessionInfo>('/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ mode: 'live', profile, rate }),
    }),

  startReplay: (tripId: string, rate = 1.0) =>
    request<SessionInfo>('/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ mode: 'replay', trip_id: tripId, rate }),
    }),

  sessionState: (id: string) => request<UiState>(`/sessions/${id}/state`),

  control: (id: string, body: { target_speed_kmph?: number; aggressiveness?: number; end_drive?: boolean }) =>
    request<{ ok: boolean }>(`/sessions/${id}/control`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    }),

  stopSession: (id: string) =>
    request<FinalReport>(`/sessions/${id}`, { method: 'DELETE' }),
};

export function liveUrl(sessionId: string): string {
  const scheme = location.protocol === 'https:' ? 'wss' : 'ws';
  return `${scheme}://${location.host}/sessions/${sessionId}/live`;
}

/**
 * Wire types of the monitor service (docs/api.md in the repository root).
 * The dashboard renders these verbatim and never recomputes a threshold.
 */

export interface SegmentPanel {
  segment: 'urban' | 'rural' | 'motorway';
  distance_km: number;
  share_lo: number;
  share_hi: number;
  share_lo_km: number;
  share_hi_km: number;
  min_distance_km: number;
  avg_velocity_kmph: number | null;
  dynamics_p95: number | null;
  dynamics_threshold: number | null;
  rpa: number | null;
  rpa_threshold: number | null;
}

export interface ConstraintRow {
  id: string;
  description: string;
  status: 'ok' | 'violated' | 'pending';
  current: number | null;
  bound: string;
}

export interface TriggerNote {
  t_s: number;
  message: string;
}

export interface UiState {
  type: 'state';
  t_s: number;
  velocity_kmph: number;
  total_distance_km: number;
  expected_trip_km: number;
  verdict: '?' | 'valid' | 'invalid';
  irrecoverable: boolean;
  nox_mg_per_km: number | null;
  nox_limit_mg_per_km: number;
  segments: SegmentPanel[];
  constraints: ConstraintRow[];
  recent_triggers: TriggerNote[];
}

export interface TriggerRecord {
  type: 'trigger';
  t_s: number;
  message: string;
}

export type LiveMessage = UiState | TriggerRecord;

export interface SessionInfo {
  id: string;
  mode: 'replay' | 'live';
  status: 'running' | 'finished';
}

export interface TripInfo {
  id: string;
  model: string;
  n_events: number;
  duration_s: number;
}

export interface ReportRow {
  segment: string;
  distance_km: number;
  nox_mg_per_km: number | null;
  co2_g_per_km: number | null;
}

export interface FinalReport {
  session_id: string;
  trip_id: string;
  verdict: '?' | 'valid' | 'invalid';
  irrecoverable: boolean;
  state: UiState;
  report: { rows: ReportRow[] };
}

export type SeriesMap = Record<string, Array<[number, number]>>;

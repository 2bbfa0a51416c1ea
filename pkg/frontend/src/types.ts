// Wire types for the haibench session API. The client renders strictly
// from these payloads; it never recomputes rankings or ground truth.

export interface EnemyView {
  id: string;
  x: number;
  y: number;
  threat: number;
}

export interface FriendlyView {
  id: string;
  x: number;
  y: number;
}

export interface ScenarioView {
  grid_size: number;
  hq: [number, number];
  enemies: EnemyView[];
  friendlies: FriendlyView[];
  seed?: number;
}

export interface PairView {
  rank: number;
  enemy: string;
  friendly: string;
  distance: number;
}

export interface DistanceRow {
  enemy: string;
  friendly: string;
  distance: number;
  enemy_hq_distance: number;
  threat: number;
}

export type AutomationLevel =
  | "information"
  | "low_decision"
  | "medium_decision"
  | "high_decision";

export interface AdviceView {
  level: AutomationLevel;
  pairs: PairView[];
  recommended_action?: "engage" | "decline";
  recommended_option?: string;
  distances?: DistanceRow[];
}

export interface ProbeView {
  prompt: string;
  expected: string;
}

export interface TrialView {
  trial: number;
  of: number;
  scenario: ScenarioView;
  advice: AdviceView;
  probe: ProbeView | null;
}

export interface CreatedSession {
  session_id: string;
  n_trials: number;
  trial: TrialView;
}

export type EventKind =
  | "stimulus"
  | "advice"
  | "operator_action"
  | "system_response"
  | "feedback"
  | "alarm"
  | "questionnaire";

export interface ClientEvent {
  kind: EventKind;
  t: number; // integer ms since session start, client-measured
  trial?: number;
  payload: Record<string, unknown>;
}

export interface AppendedEvent {
  kind: EventKind;
  t: number;
  trial?: number;
  payload: Record<string, unknown>;
}

export interface PostEventsResponse {
  accepted: number;
  appended: AppendedEvent[];
}

export interface LikertItem {
  name: string;
  value: number;
}

export interface CompleteResponse {
  log_path: string;
  events: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

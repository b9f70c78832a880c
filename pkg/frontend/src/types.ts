// Mirrors the service session JSON. The server is the source of truth:
// the UI renders exactly what the last response said and never computes a
// diagnosis or plan locally.

export type SessionState =
  | 'NEW'
  | 'LABS_ENTERED'
  | 'DIAGNOSED'
  | 'TESTS_RECOMMENDED'
  | 'REPORT_INGESTED'
  | 'TREATMENT_PLANNED';

export const STATE_ORDER: SessionState[] = [
  'NEW',
  'LABS_ENTERED',
  'DIAGNOSED',
  'TESTS_RECOMMENDED',
  'REPORT_INGESTED',
  'TREATMENT_PLANNED',
];

export const LAB_NAMES = [
  'ALB', 'ALP', 'ALT', 'AST', 'BIL', 'CHE', 'CHOL', 'CREA', 'GGT', 'PROT',
] as const;

export type LabName = (typeof LAB_NAMES)[number];

export interface FiredRule {
  rule: string;
  head_property: string;
  comparisons: string[];
  bindings: Record<string, unknown>;
  rendered: string;
}

export interface RecommendedTest {
  test: string;
  interval?: string;
  provenance: string;
}

export interface RegimenItem {
  drug: string;
  dose: string;
  provenance: string;
}

export interface MonitoringItem {
  action: string;
  interval?: string;
  provenance: string;
}

export interface LifestyleItem {
  advice: string;
  provenance: string;
}

export interface ReferralItem {
  action: string;
  provenance: string;
}

export interface TreatmentPlan {
  regimen: RegimenItem[];
  duration_weeks: number;
  monitoring: MonitoringItem[];
  lifestyle: LifestyleItem[];
  referrals: ReferralItem[];
}

export interface SessionView {
  id: string;
  state: SessionState;
  record: {
    uid: string;
    age: number;
    sex: number;
    labs: Record<string, number>;
  } | null;
  diagnosis: string | null;
  fired_rules: FiredRule[];
  recommended_tests: RecommendedTest[];
  report_text: string | null;
  report_facts: Record<string, unknown> | null;
  plan: TreatmentPlan | null;
}

export interface PlanResponse {
  state: SessionState;
  plan: TreatmentPlan;
}

export interface ExplanationResponse {
  explanation: string;
  enhanced: string | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export interface LabFormValues {
  age: string;
  sex: string;
  labs: Record<LabName, string>;
}

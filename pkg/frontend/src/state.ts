import type {
  ExplanationResponse,
  LabFormValues,
  LabName,
  SessionState,
  SessionView,
  TreatmentPlan,
} from './types';
import { LAB_NAMES, STATE_ORDER } from './types';

export interface AppState {
  session: SessionView | null;
  plan: TreatmentPlan | null;
  explanation: ExplanationResponse | null;
  form: LabFormValues;
  fieldErrors: Record<string, string>;
  banner: string | null;
  busy: boolean;
}

export function initialState(): AppState {
  const labs = {} as Record<LabName, string>;
  for (const lab of LAB_NAMES) {
    labs[lab] = '';
  }
  return {
    session: null,
    plan: null,
    explanation: null,
    form: { age: '', sex: '0', labs },
    fieldErrors: {},
    banner: null,
    busy: false,
  };
}

export function sessionState(state: AppState): SessionState {
  return state.session?.state ?? 'NEW';
}

function reached(current: SessionState, target: SessionState): boolean {
  return STATE_ORDER.indexOf(current) >= STATE_ORDER.indexOf(target);
}

export interface Step {
  id: 'labs' | 'diagnosis' | 'report' | 'plan';
  title: string;
  enabled: (state: AppState) => boolean;
  done: (state: AppState) => boolean;
}

// Healthy sessions stop at DIAGNOSED: the report and plan steps stay
// disabled because no tests are recommended.
export const STEPS: Step[] = [
  {
    id: 'labs',
    title: 'Labs',
    enabled: () => true,
    done: (s) => reached(sessionState(s), 'DIAGNOSED'),
  },
  {
    id: 'diagnosis',
    title: 'Diagnosis',
    enabled: (s) => reached(sessionState(s), 'DIAGNOSED'),
    done: (s) => reached(sessionState(s), 'DIAGNOSED'),
  },
  {
    id: 'report',
    title: 'Test report',
    enabled: (s) => reached(sessionState(s), 'TESTS_RECOMMENDED'),
    done: (s) => reached(sessionState(s), 'REPORT_INGESTED'),
  },
  {
    id: 'plan',
    title: 'Treatment plan',
    enabled: (s) => reached(sessionState(s), 'REPORT_INGESTED'),
    done: (s) => reached(sessionState(s), 'TREATMENT_PLANNED'),
  },
];

// Labs must be positive numbers; age a positive integer; sex 0 or 1.
// Validation failures block the request entirely.
export function validateLabForm(form: LabFormValues): Record<string, string> {
  const errors: Record<string, string> = {};
  const age = Number(form.age);
  if (form.age.trim() === '' || !Number.isFinite(age) || age <= 0 || !Number.isInteger(age)) {
    errors.age = 'Age must be a positive whole number';
  }
  if (form.sex !== '0' && form.sex !== '1') {
    errors.sex = 'Sex must be selected';
  }
  for (const lab of LAB_NAMES) {
    const raw = form.labs[lab].trim();
    const value = Number(raw);
    if (raw === '' || !Number.isFinite(value) || value <= 0) {
      errors[lab] = `${lab} must be a number > 0`;
    }
  }
  return errors;
}

export function labPayload(form: LabFormValues): {
  age: number;
  sex: number;
  labs: Record<string, number>;
} {
  const labs: Record<string, number> = {};
  for (const lab of LAB_NAMES) {
    labs[lab] = Number(form.labs[lab]);
  }
  return { age: Number(form.age), sex: Number(form.sex), labs };
}

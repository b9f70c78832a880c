import type { AppState } from './state';
import { STEPS, sessionState } from './state';
import { LAB_NAMES } from './types';

export interface Handlers {
  onSubmitLabs: () => void;
  onSubmitReport: (text: string) => void;
  onShowPlan: () => void;
  onLabInput: (field: string, value: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderStepper(state: AppState): HTMLElement {
  const nav = el('nav', 'stepper');
  for (const step of STEPS) {
    const chip = el('span', 'step', step.title);
    chip.dataset.step = step.id;
    if (!step.enabled(state)) chip.classList.add('disabled');
    if (step.done(state)) chip.classList.add('done');
    nav.appendChild(chip);
  }
  const stateChip = el('span', 'state-chip', sessionState(state));
  stateChip.dataset.testid = 'state-chip';
  nav.appendChild(stateChip);
  return nav;
}

function renderBanner(state: AppState): HTMLElement | null {
  if (!state.banner) return null;
  const banner = el('div', 'banner error', state.banner);
  banner.dataset.testid = 'banner';
  return banner;
}

function renderLabForm(state: AppState, handlers: Handlers): HTMLElement {
  const section = el('section', 'panel lab-form');
  section.appendChild(el('h2', undefined, 'Patient labs'));

  const grid = el('div', 'field-grid');
  const addField = (name: string, label: string, value: string) => {
    const wrap = el('label', 'field');
    wrap.appendChild(el('span', 'field-label', label));
    const input = el('input');
    input.name = name;
    input.value = value;
    input.addEventListener('input', () => handlers.onLabInput(name, input.value));
    wrap.appendChild(input);
    const error = state.fieldErrors[name];
    if (error) {
      const msg = el('span', 'field-error', error);
      msg.dataset.field = name;
      wrap.appendChild(msg);
    }
    grid.appendChild(wrap);
  };

  addField('age', 'Age (years)', state.form.age);
  const sexWrap = el('label', 'field');
  sexWrap.appendChild(el('span', 'field-label', 'Sex'));
  const select = el('select');
  select.name = 'sex';
  for (const [value, label] of [
    ['0', 'Female'],
    ['1', 'Male'],
  ] as const) {
    const option = el('option', undefined, label);
    option.value = value;
    if (state.form.sex === value) option.selected = true;
    select.appendChild(option);
  }
  select.addEventListener('change', () => handlers.onLabInput('sex', select.value));
  sexWrap.appendChild(select);
  grid.appendChild(sexWrap);

  for (const lab of LAB_NAMES) {
    addField(lab, `${lab} (IU/L)`, state.form.labs[lab]);
  }
  section.appendChild(grid);

  const submit = el('button', 'primary', 'Diagnose');
  submit.dataset.testid = 'submit-labs';
  submit.disabled = state.busy || sessionState(state) !== 'NEW';
  submit.addEventListener('click', handlers.onSubmitLabs);
  section.appendChild(submit);
  return section;
}

function renderDiagnosis(state: AppState): HTMLElement | null {
  const session = state.session;
  if (!session || !session.diagnosis) return null;
  const section = el('section', 'panel diagnosis-panel');
  section.dataset.testid = 'diagnosis-panel';
  section.appendChild(el('h2', undefined, 'Diagnosis'));
  section.appendChild(el('p', 'diagnosis-name', session.diagnosis));

  for (const fired of session.fired_rules) {
    const card = el('div', 'fired-rule');
    card.appendChild(el('h3', undefined, `Rule: ${fired.rule}`));
    const list = el('ul', 'comparisons');
    for (const comparison of fired.comparisons) {
      // every listed comparison held; highlight it as satisfied
      list.appendChild(el('li', 'comparison satisfied', comparison));
    }
    card.appendChild(list);
    section.appendChild(card);
  }

  if (session.recommended_tests.length > 0) {
    section.appendChild(el('h3', undefined, 'Recommended tests'));
    const list = el('ul', 'recommended-tests');
    for (const test of session.recommended_tests) {
      const interval = test.interval ? ` (${test.interval})` : '';
      const item = el('li', 'test', `${test.test}${interval}`);
      item.appendChild(el('span', 'provenance', ` [${test.provenance}]`));
      list.appendChild(item);
    }
    section.appendChild(list);
  }
  return section;
}

function renderReportForm(state: AppState, handlers: Handlers): HTMLElement | null {
  const step = STEPS.find((s) => s.id === 'report')!;
  if (!step.enabled(state)) return null;
  const section = el('section', 'panel report-form');
  section.appendChild(el('h2', undefined, 'Test report'));
  section.appendChild(
    el(
      'p',
      'hint',
      'Paste the report text, e.g. "HCV RNA: POSITIVE", "FIBROSIS STAGE: F2", '
        + '"CHILD-PUGH: A", "ASCITES: ABSENT".',
    ),
  );
  const textarea = el('textarea');
  textarea.name = 'report';
  textarea.rows = 5;
  if (state.session?.report_text) {
    textarea.value = state.session.report_text;
  }
  section.appendChild(textarea);
  const submit = el('button', 'primary', 'Submit report');
  submit.dataset.testid = 'submit-report';
  submit.disabled = state.busy || sessionState(state) !== 'TESTS_RECOMMENDED';
  submit.addEventListener('click', () => handlers.onSubmitReport(textarea.value));
  section.appendChild(submit);
  return section;
}

function renderPlan(state: AppState): HTMLElement | null {
  const plan = state.plan ?? state.session?.plan ?? null;
  if (!plan) return null;
  const section = el('section', 'panel plan-panel');
  section.dataset.testid = 'plan-panel';
  section.appendChild(el('h2', undefined, 'Treatment plan'));

  const card = el('div', 'regimen-card');
  card.dataset.testid = 'regimen-card';
  if (plan.regimen.length === 0) {
    card.appendChild(el('p', 'no-regimen', 'No antiviral regimen (viremia negative)'));
  } else {
    card.appendChild(el('h3', undefined, `Regimen - ${plan.duration_weeks} weeks`));
    const list = el('ul', 'drugs');
    for (const item of plan.regimen) {
      const row = el('li', 'drug', `${item.drug} ${item.dose}`);
      row.appendChild(el('span', 'provenance', ` [${item.provenance}]`));
      list.appendChild(row);
    }
    card.appendChild(list);
  }
  section.appendChild(card);

  const addList = (title: string, className: string, rows: string[][]) => {
    if (rows.length === 0) return;
    section.appendChild(el('h3', undefined, title));
    const list = el('ul', className);
    for (const [text, provenance] of rows) {
      const item = el('li', undefined, text);
      item.appendChild(el('span', 'provenance', ` [${provenance}]`));
      list.appendChild(item);
    }
    section.appendChild(list);
  };

  addList(
    'Monitoring',
    'monitoring',
    plan.monitoring.map((m) => [m.interval ? `${m.action} (${m.interval})` : m.action, m.provenance]),
  );
  addList('Lifestyle', 'lifestyle', plan.lifestyle.map((l) => [l.advice, l.provenance]));
  addList('Referrals', 'referrals', plan.referrals.map((r) => [r.action, r.provenance]));
  return section;
}

function renderExplanation(state: AppState): HTMLElement | null {
  if (!state.explanation) return null;
  const section = el('section', 'panel explanation-panel');
  section.appendChild(el('h2', undefined, 'Explanation'));
  const template = el('pre', 'explanation-text', state.explanation.explanation);
  template.dataset.testid = 'explanation-template';
  section.appendChild(template);
  if (state.explanation.enhanced) {
    section.appendChild(el('h3', undefined, 'Enhanced explanation (remote)'));
    const enhanced = el('pre', 'explanation-enhanced', state.explanation.enhanced);
    enhanced.dataset.testid = 'explanation-enhanced';
    section.appendChild(enhanced);
  }
  return section;
}

export function render(root: HTMLElement, state: AppState, handlers: Handlers): void {
  root.textContent = '';
  root.appendChild(renderStepper(state));
  for (const part of [
    renderBanner(state),
    renderLabForm(state, handlers),
    renderDiagnosis(state),
    renderReportForm(state, handlers),
    renderPlan(state),
    renderExplanation(state),
  ]) {
    if (part) root.appendChild(part);
  }
}

import { ApiClient, ApiError } from './api';
import type { AppState } from './state';
import { initialState, labPayload, validateLabForm } from './state';
import type { Handlers } from './render';
import { render } from './render';
import type { LabName } from './types';
import { LAB_NAMES } from './types';

export class App {
  private state: AppState = initialState();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {}

  private handlers: Handlers = {
    onSubmitLabs: () => void this.submitLabs(),
    onSubmitReport: (text) => void this.submitReport(text),
    onShowPlan: () => void this.showPlan(),
    onLabInput: (field, value) => {
      if (field === 'age' || field === 'sex') {
        this.state.form[field] = value;
      } else if ((LAB_NAMES as readonly string[]).includes(field)) {
        this.state.form.labs[field as LabName] = value;
      }
      // keep typing cheap: no re-render on every keystroke
    },
  };

  draw(): void {
    render(this.root, this.state, this.handlers);
  }

  /** Restore a session after back/refresh; renders from the server view. */
  async restore(sessionId: string): Promise<void> {
    try {
      const session = await this.api.getSession(sessionId);
      this.state.session = session;
      this.state.plan = session.plan;
      if (session.diagnosis) {
        this.state.explanation = await this.api.getExplanation(sessionId);
      }
    } catch (error) {
      this.state.banner = describe(error);
    }
    this.draw();
  }

  private async submitLabs(): Promise<void> {
    const errors = validateLabForm(this.state.form);
    this.state.fieldErrors = errors;
    if (Object.keys(errors).length > 0) {
      this.draw();
      return; // no request leaves the client while the form is invalid
    }
    this.state.busy = true;
    this.state.banner = null;
    this.draw();
    try {
      const created = this.state.session ?? (await this.api.createSession());
      const session = await this.api.submitLabs(created.id, labPayload(this.state.form));
      this.state.session = session;
      this.state.explanation = await this.api.getExplanation(session.id);
    } catch (error) {
      this.state.banner = describe(error); // form values stay as entered
    } finally {
      this.state.busy = false;
      this.draw();
    }
  }

  private async submitReport(text: string): Promise<void> {
    if (!this.state.session) return;
    this.state.busy = true;
    this.state.banner = null;
    this.draw();
    try {
      const session = await this.api.submitReport(this.state.session.id, text);
      this.state.session = session;
      await this.showPlan();
    } catch (error) {
      this.state.banner = describe(error);
    } finally {
      this.state.busy = false;
      this.draw();
    }
  }

  private async showPlan(): Promise<void> {
    if (!this.state.session) return;
    const response = await this.api.getPlan(this.state.session.id);
    this.state.plan = response.plan;
    this.state.session = { ...this.state.session, state: response.state };
    this.state.explanation = await this.api.getExplanation(this.state.session.id);
    this.draw();
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  return `network error: ${String(error)}`;
}

export function mount(root: HTMLElement, baseUrl = ''): App {
  const app = new App(root, new ApiClient(baseUrl));
  const params = new URLSearchParams(window.location.search);
  const existing = params.get('session');
  if (existing) {
    void app.restore(existing);
  } else {
    app.draw();
  }
  return app;
}

/**
 * Session state for the what-if loop.
 *
 * One store per tab. The designer picks a fixture scene, assigns size
 * codes to customizable categories, and generates; each successful
 * generation appends a history entry (bounded, oldest dropped) so results
 * can be compared side by side. At most one layout request is in flight:
 * generate() while busy is a no-op, and a failed request leaves history
 * untouched.
 */

import {
  ApiError,
  Catalog,
  LayoutResponse,
  SceneSummary,
  SizeRequest,
} from "./api.js";

/** The slice of the service client the session store depends on. */
export interface LayoutApi {
  getScenes(): Promise<SceneSummary[]>;
  getCatalog(): Promise<Catalog>;
  requestLayout(
    sceneId: string,
    requests: SizeRequest[],
    render?: boolean,
  ): Promise<LayoutResponse>;
}

export interface HistoryEntry {
  sceneId: string;
  requests: SizeRequest[];
  /** human-readable per-request labels, e.g. "bed: WidthLeft" */
  labels: string[];
  imageBase64: string | null;
  response: LayoutResponse;
  at: number;
}

export interface SessionSnapshot {
  scenes: SceneSummary[];
  catalog: Catalog | null;
  selectedSceneId: string | null;
  pending: SizeRequest[];
  history: HistoryEntry[];
  busy: boolean;
  error: string | null;
}

export const DEFAULT_HISTORY_LIMIT = 8;
export const DEFAULT_SIZE_CODE = "Default";

type Listener = (state: SessionSnapshot) => void;

export class SessionStore {
  private scenes: SceneSummary[] = [];
  private catalog: Catalog | null = null;
  private selectedSceneId: string | null = null;
  private pending = new Map<number, string>();
  private history: HistoryEntry[] = [];
  private busy = false;
  private error: string | null = null;
  private listeners: Listener[] = [];

  constructor(
    private readonly api: LayoutApi,
    private readonly historyLimit = DEFAULT_HISTORY_LIMIT,
    private readonly now: () => number = () => Date.now(),
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const listener of this.listeners) listener(snap);
  }

  snapshot(): SessionSnapshot {
    return {
      scenes: [...this.scenes],
      catalog: this.catalog,
      selectedSceneId: this.selectedSceneId,
      pending: this.pendingRequests(),
      history: [...this.history],
      busy: this.busy,
      error: this.error,
    };
  }

  async loadScenes(): Promise<void> {
    try {
      this.scenes = await this.api.getScenes();
      this.error = null;
    } catch (err) {
      this.error = describe(err);
    }
    this.emit();
  }

  async loadCatalog(): Promise<void> {
    try {
      this.catalog = await this.api.getCatalog();
      this.error = null;
    } catch (err) {
      this.error = describe(err);
    }
    this.emit();
  }

  selectScene(sceneId: string): void {
    this.selectedSceneId = sceneId;
    this.emit();
  }

  /** Upsert the size code for one category in the pending request list. */
  setSizeCode(categoryId: number, sizeCode: string): void {
    this.pending.set(categoryId, sizeCode);
    this.emit();
  }

  clearRequests(): void {
    this.pending.clear();
    this.emit();
  }

  pendingRequests(): SizeRequest[] {
    return [...this.pending.entries()].map(([category_id, size_code]) => ({
      category_id,
      size_code,
    }));
  }

  private labelFor(request: SizeRequest): string {
    const name =
      this.catalog?.categories.find((c) => c.id === request.category_id)?.name ??
      `#${request.category_id}`;
    return `${name}: ${request.size_code}`;
  }

  /**
   * Issue exactly one layout request for the current scene and pending
   * size codes. Returns the new history entry, or null when nothing was
   * sent (no scene selected, or a request is already in flight).
   */
  async generate(): Promise<HistoryEntry | null> {
    if (this.busy || this.selectedSceneId === null) return null;
    this.busy = true;
    this.error = null;
    this.emit();
    const requests = this.pendingRequests();
    try {
      const response = await this.api.requestLayout(this.selectedSceneId, requests, true);
      const entry: HistoryEntry = {
        sceneId: this.selectedSceneId,
        requests,
        labels: requests.map((r) => this.labelFor(r)),
        imageBase64: response.image,
        response,
        at: this.now(),
      };
      this.history.push(entry);
      if (this.history.length > this.historyLimit) {
        this.history.splice(0, this.history.length - this.historyLimit);
      }
      return entry;
    } catch (err) {
      this.error = describe(err);
      return null;
    } finally {
      this.busy = false;
      this.emit();
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.status} ${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

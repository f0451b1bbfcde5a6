/**
 * Typed client for the roomfit inference service.
 *
 * Thin wrapper over fetch: every method hits one endpoint, parses JSON,
 * and maps non-2xx responses to ApiError carrying the service's
 * {code, message} payload.
 */

export interface SceneSummary {
  id: string;
  room_type: string;
  thumbnail: string;
}

export interface CatalogCategory {
  id: number;
  name: string;
  customized: boolean;
  default_size: { length: number; width: number; height: number };
  size_range: {
    length: [number, number];
    width: [number, number];
    height: [number, number];
  };
  color: [number, number, number];
}

export interface Catalog {
  categories: CatalogCategory[];
  palette: {
    background: [number, number, number];
    wall: [number, number, number];
    door: [number, number, number];
    window: [number, number, number];
    hash: string;
  };
  size_codes: string[];
}

export interface SizeRequest {
  category_id: number;
  size_code: string;
}

export interface FurnitureItem {
  category_id: number;
  category: string;
  customized: boolean;
  position: [number, number];
  size: { length: number; width: number; height: number };
  orientation: string;
}

export interface LayoutResponse {
  layout: {
    room_type: string;
    bounds: [number, number, number, number];
    furniture: FurnitureItem[];
  };
  violations: { kind: string; indices: number[]; message: string }[];
  warnings: { code: string; message: string }[];
  image: string | null;
  model_version: string;
  latency_ms: number;
}

export interface Health {
  status: string;
  model_loaded: boolean;
  checkpoint_hash: string;
  uptime_s: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let code = "http_error";
      let message = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<Health> {
    return this.request<Health>("/healthz");
  }

  getScenes(): Promise<SceneSummary[]> {
    return this.request<SceneSummary[]>("/api/v1/scenes");
  }

  getCatalog(): Promise<Catalog> {
    return this.request<Catalog>("/api/v1/catalog");
  }

  requestLayout(
    sceneId: string,
    requests: SizeRequest[],
    render = true,
  ): Promise<LayoutResponse> {
    return this.request<LayoutResponse>("/api/v1/layout", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ scene_id: sceneId, requests, render }),
    });
  }

  thumbnailUrl(scene: SceneSummary): string {
    return `${this.baseUrl}${scene.thumbnail}`;
  }
}

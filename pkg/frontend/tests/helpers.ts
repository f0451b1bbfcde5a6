import type {
  Catalog,
  LayoutResponse,
  SceneSummary,
  SizeRequest,
} from "../src/api.js";
import type { LayoutApi } from "../src/state.js";
import { ApiError } from "../src/api.js";

export const SIZE_CODES = [
  "Default",
  "WidthLeft",
  "WidthRight",
  "LengthUp",
  "LengthDown",
];

export function fakeCatalog(): Catalog {
  return {
    categories: [
      {
        id: 0,
        name: "bed",
        customized: true,
        default_size: { length: 1.3, width: 1.4, height: 0.5 },
        size_range: { length: [0.65, 3.25], width: [0.7, 3.5], height: [0.25, 1.25] },
        color: [220, 20, 20],
      },
      {
        id: 1,
        name: "cabinet",
        customized: true,
        default_size: { length: 0.5, width: 1.2, height: 2.2 },
        size_range: { length: [0.25, 1.25], width: [0.6, 3.0], height: [1.1, 5.5] },
        color: [0, 150, 0],
      },
      {
        id: 8,
        name: "chair",
        customized: false,
        default_size: { length: 0.5, width: 0.5, height: 0.9 },
        size_range: { length: [0.5, 0.5], width: [0.5, 0.5], height: [0.9, 0.9] },
        color: [255, 170, 190],
      },
    ],
    palette: {
      background: [255, 255, 255],
      wall: [0, 0, 0],
      door: [255, 128, 0],
      window: [0, 176, 255],
      hash: "abc123",
    },
    size_codes: [...SIZE_CODES],
  };
}

export function fakeScenes(): SceneSummary[] {
  return [
    { id: "00000", room_type: "bedroom", thumbnail: "/api/v1/scenes/00000/thumbnail.png" },
    { id: "00001", room_type: "kitchen", thumbnail: "/api/v1/scenes/00001/thumbnail.png" },
  ];
}

export function fakeResponse(requests: SizeRequest[]): LayoutResponse {
  // image varies with the request so history panels are distinguishable
  const tag = requests.map((r) => `${r.category_id}:${r.size_code}`).join("|") || "none";
  return {
    layout: {
      room_type: "bedroom",
      bounds: [0, 0, 4.4, 4.4],
      furniture: [],
    },
    violations: [],
    warnings: [],
    image: Buffer.from(`png-bytes-${tag}`).toString("base64"),
    model_version: "deadbeef",
    latency_ms: 12.5,
  };
}

export class FakeApi implements LayoutApi {
  layoutCalls: { sceneId: string; requests: SizeRequest[] }[] = [];
  failNext: ApiError | null = null;
  /** when set, requestLayout awaits this promise before resolving */
  gate: Promise<void> | null = null;

  async getScenes(): Promise<SceneSummary[]> {
    return fakeScenes();
  }

  async getCatalog(): Promise<Catalog> {
    return fakeCatalog();
  }

  async requestLayout(
    sceneId: string,
    requests: SizeRequest[],
  ): Promise<LayoutResponse> {
    if (this.gate) await this.gate;
    this.layoutCalls.push({ sceneId, requests: [...requests] });
    if (this.failNext) {
      const err = this.failNext;
      this.failNext = null;
      throw err;
    }
    return fakeResponse(requests);
  }
}

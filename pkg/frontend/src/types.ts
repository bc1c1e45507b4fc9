// Wire types mirroring the shared JSON schemas
// (src/digitink/schemas/infer_request.schema.json / infer_response.schema.json).
// Coordinates are client canvas CSS pixels, y growing downward; t is
// milliseconds from gesture start.

export interface TouchSample {
  x: number;
  y: number;
  t: number;
}

export interface CanvasStroke {
  points: TouchSample[];
  active: boolean;
}

export type ModelName = "bitmap2d" | "polar1d";

export interface InferenceRequest {
  model: ModelName;
  strokes: TouchSample[][];
  partial?: boolean;
}

export interface InferenceResponse {
  probabilities: number[];
  top: number;
  completion_hint: number;
}

export interface ApiError {
  code: string;
  message: string;
}

export interface LivePrediction {
  probabilities: number[];
  top: number;
  updatedAt: number;
}

export const UNIFORM_PREDICTION: LivePrediction = {
  probabilities: Array(10).fill(0.1),
  top: 0,
  updatedAt: 0,
};

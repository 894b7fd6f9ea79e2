export { App, createApp } from "./app.js";
export { RefinementControls } from "./controls.js";
export { ProbabilityDistributionView } from "./distribution.js";
export { buildGlyph, FeatureContributionView } from "./glyphs.js";
export { NetworkLayoutViews } from "./layouts.js";
export { Lasso, pointInPolygon } from "./lasso.js";
export {
  RequestFailed,
  SessionClient,
  WebSocketTransport,
} from "./protocol.js";
export type {
  DefinitionJson,
  EmbeddingJson,
  Envelope,
  FeatureColors,
  HistogramPayload,
  ModelJson,
  NetworkTag,
  SessionPayload,
  Transport,
} from "./protocol.js";
export { ContrastiveScatterplot } from "./scatterplot.js";
export { Store } from "./state.js";
export type { ViewState } from "./state.js";
export { loadingColor, valueColor } from "./colors.js";

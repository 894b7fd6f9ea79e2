/**
 * jsdom has no raster backend, so canvas views fall back to their data
 * models. Returning null here keeps that path quiet instead of logging a
 * not-implemented error on every paint.
 */

HTMLCanvasElement.prototype.getContext = (() => null) as never;

export {};

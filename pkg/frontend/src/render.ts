// Pure rendering helpers: pixel payload decoding, integer upscaling, and the
// heat-strip fallback for non-image feature vectors.

import type { ImageMeta } from "./api.js";

export function decodeBase64(data: string): Uint8Array {
  const bin = typeof atob === "function" ? atob(data) : bufferDecode(data);
  const out = new Uint8Array(bin.length);
  for (let k = 0; k < bin.length; k++) out[k] = bin.charCodeAt(k);
  return out;
}

interface BufferLike {
  from(data: string, encoding: string): { toString(encoding: string): string };
}

function bufferDecode(data: string): string {
  // Node (vitest) has Buffer but no atob on older targets.
  const B = (globalThis as { Buffer?: BufferLike }).Buffer;
  if (!B) throw new Error("no base64 decoder available");
  return B.from(data, "base64").toString("binary");
}

export function payloadMatchesMeta(pixels: Uint8Array, meta: ImageMeta): boolean {
  return pixels.length === meta.width * meta.height * meta.channels;
}

/** Integer factor that scales an image up to roughly the target edge length,
 * never below 1. */
export function upscaleFactor(meta: ImageMeta, targetEdge = 160): number {
  const edge = Math.max(meta.width, meta.height);
  return Math.max(1, Math.floor(targetEdge / edge));
}

/** Expand pixels into RGBA for a canvas ImageData buffer, applying integer
 * upscaling. Grayscale payloads replicate into all three channels. */
export function toRGBA(
  pixels: Uint8Array,
  meta: ImageMeta,
  scale: number,
): Uint8ClampedArray<ArrayBuffer> {
  if (!payloadMatchesMeta(pixels, meta)) {
    throw new Error(
      `payload has ${pixels.length} bytes, expected ` +
        `${meta.width * meta.height * meta.channels}`,
    );
  }
  const { width, height, channels } = meta;
  const out = new Uint8ClampedArray(width * scale * height * scale * 4);
  for (let y = 0; y < height * scale; y++) {
    const sy = Math.floor(y / scale);
    for (let x = 0; x < width * scale; x++) {
      const sx = Math.floor(x / scale);
      const src = (sy * width + sx) * channels;
      const dst = (y * width * scale + x) * 4;
      const r = pixels[src];
      out[dst] = r;
      out[dst + 1] = channels >= 3 ? pixels[src + 1] : r;
      out[dst + 2] = channels >= 3 ? pixels[src + 2] : r;
      out[dst + 3] = 255;
    }
  }
  return out;
}

/** Min-max scale a feature vector into [0, 255] cells for the heat strip
 * shown when the dataset is not made of images. */
export function heatStripCells(values: number[]): number[] {
  if (values.length === 0) return [];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (hi === lo) return values.map(() => 128);
  return values.map((v) => Math.round(((v - lo) / (hi - lo)) * 255));
}

/* tslint:disable */
/* eslint-disable */

/**
 * Per-chunk classification of a baseline/control/experimental triple.
 */
export class ChunkMap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major: 0 unstable, 1 matched, 2 changed.
     */
    readonly classes: Uint8Array;
    readonly cols: number;
    readonly delta: number | undefined;
    readonly rows: number;
    readonly skip: string | undefined;
}

/**
 * Shingle multiset of an image: distinct chunk digests and their counts.
 */
export class Shingles {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly counts: Uint32Array;
    readonly tokens: string[];
}

export function chunkMap(width: number, height: number, baseline: Uint8Array, control: Uint8Array, experimental: Uint8Array, chunk_px: number): ChunkMap;

export function shingles(width: number, height: number, rgba: Uint8Array, chunk_px: number): Shingles;

/**
 * Word-level difference in distance for a baseline/control/experimental trio.
 */
export function textDid(baseline: string, control: string, experimental: string): number;

/**
 * Jaccard distance between the word multisets of two texts.
 */
export function textDistance(a: string, b: string): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_chunkmap_free: (a: number, b: number) => void;
    readonly __wbg_shingles_free: (a: number, b: number) => void;
    readonly chunkMap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly chunkmap_classes: (a: number) => [number, number];
    readonly chunkmap_cols: (a: number) => number;
    readonly chunkmap_delta: (a: number) => [number, number];
    readonly chunkmap_rows: (a: number) => number;
    readonly chunkmap_skip: (a: number) => [number, number];
    readonly shingles: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly shingles_counts: (a: number) => [number, number];
    readonly shingles_tokens: (a: number) => [number, number];
    readonly textDid: (a: number, b: number, c: number, d: number, e: number, f: number) => number;
    readonly textDistance: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;

/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_chunkmap_free: (a: number, b: number) => void;
export const __wbg_shingles_free: (a: number, b: number) => void;
export const chunkMap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const chunkmap_classes: (a: number) => [number, number];
export const chunkmap_cols: (a: number) => number;
export const chunkmap_delta: (a: number) => [number, number];
export const chunkmap_rows: (a: number) => number;
export const chunkmap_skip: (a: number) => [number, number];
export const shingles: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const shingles_counts: (a: number) => [number, number];
export const shingles_tokens: (a: number) => [number, number];
export const textDid: (a: number, b: number, c: number, d: number, e: number, f: number) => number;
export const textDistance: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

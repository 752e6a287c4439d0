/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_soamdemo_free: (a: number, b: number) => void;
export const habituation_curves: (a: number, b: number, c: number, d: number) => [number, number];
export const soamdemo_dim: (a: number) => number;
export const soamdemo_drawn: (a: number, b: number, c: bigint, d: number) => [number, number, number];
export const soamdemo_edges: (a: number) => [number, number];
export const soamdemo_new: (a: number, b: number, c: bigint, d: number) => [number, number, number];
export const soamdemo_positions: (a: number) => [number, number];
export const soamdemo_signals: (a: number) => bigint;
export const soamdemo_state_counts: (a: number) => [number, number];
export const soamdemo_states: (a: number) => [number, number];
export const soamdemo_step: (a: number, b: number) => [number, number, number];
export const soamdemo_triangles: (a: number) => [number, number];
export const witness_landmarks: (a: number, b: bigint) => [number, number];
export const witness_vs_delaunay: (a: number, b: number, c: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

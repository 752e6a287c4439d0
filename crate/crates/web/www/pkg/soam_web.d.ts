/* tslint:disable */
/* eslint-disable */

/**
 * A growing network fed from a seeded signal stream.
 */
export class SoamDemo {
    free(): void;
    [Symbol.dispose](): void;
    dim(): number;
    /**
     * Grows a curve on a closed polyline given as flat `x, y` pairs.
     */
    static drawn(xy: Float64Array, seed: bigint, noise: number): SoamDemo;
    /**
     * Edges as pairs of indices into `positions()`.
     */
    edges(): Uint32Array;
    /**
     * `shape` is `circle`, `sphere`, `torus` or `icosphere`. Curves use
     * dimension 1, everything else dimension 2.
     */
    constructor(shape: string, seed: bigint, noise: number);
    /**
     * Unit positions, `dim()` values per unit.
     */
    positions(): Float64Array;
    signals(): bigint;
    /**
     * Unit count per state, in the same order as `states()`.
     */
    state_counts(): Uint32Array;
    /**
     * State index per unit, from 0 (active) to 7 (singular).
     */
    states(): Uint8Array;
    /**
     * Feeds up to `n` signals; returns true once every unit has stayed
     * stable for a whole stability window, the same stop rule as the CLI.
     */
    step(n: number): boolean;
    triangles(): Uint32Array;
}

/**
 * Habituation then dishabituation from the floor, `samples` points each over `[0, t_end]`.
 */
export function habituation_curves(alpha: number, tau: number, t_end: number, samples: number): Float64Array;

/**
 * Landmarks used by `witness_vs_delaunay`, as flat `x, y` pairs.
 */
export function witness_landmarks(landmarks: number, seed: bigint): Float64Array;

/**
 * Witness and Delaunay edges for `landmarks` random points in the unit
 * square. Returns `[w, d, ...]` where the first `2w` entries after the
 * header are witness edge endpoints and the next `2d` are Delaunay edges;
 * landmark coordinates come from `witness_landmarks` with the same seed.
 */
export function witness_vs_delaunay(landmarks: number, witnesses: number, seed: bigint): Uint32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_soamdemo_free: (a: number, b: number) => void;
    readonly habituation_curves: (a: number, b: number, c: number, d: number) => [number, number];
    readonly soamdemo_dim: (a: number) => number;
    readonly soamdemo_drawn: (a: number, b: number, c: bigint, d: number) => [number, number, number];
    readonly soamdemo_edges: (a: number) => [number, number];
    readonly soamdemo_new: (a: number, b: number, c: bigint, d: number) => [number, number, number];
    readonly soamdemo_positions: (a: number) => [number, number];
    readonly soamdemo_signals: (a: number) => bigint;
    readonly soamdemo_state_counts: (a: number) => [number, number];
    readonly soamdemo_states: (a: number) => [number, number];
    readonly soamdemo_step: (a: number, b: number) => [number, number, number];
    readonly soamdemo_triangles: (a: number) => [number, number];
    readonly witness_landmarks: (a: number, b: bigint) => [number, number];
    readonly witness_vs_delaunay: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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

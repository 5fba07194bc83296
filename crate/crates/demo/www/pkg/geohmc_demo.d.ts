/* tslint:disable */
/* eslint-disable */

/**
 * A target/kinetic pair selected on the page.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    isFeasible(q1: number, q2: number): boolean;
    constructor(target_name: string, kinetic_name: string);
    potentialGrid(x0: number, x1: number, y0: number, y1: number, nx: number, ny: number): Float64Array;
    /**
     * Returns `[accept_rate, divergences, x0, y0, x1, y1, …]`.
     */
    sample(seed: number, count: number, step: number, steps: number): Float64Array;
    /**
     * Returns `[reflections, n_points, x0, y0, x1, y1, …, H0, H1, …]`.
     */
    trajectory(q1: number, q2: number, p1: number, p2: number, step: number, steps: number): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_isFeasible: (a: number, b: number, c: number) => number;
    readonly demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_potentialGrid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly demo_sample: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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

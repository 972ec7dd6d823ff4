/* tslint:disable */
/* eslint-disable */

export class RunResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly component: string;
    readonly entropy: Float64Array;
    readonly exact: Float64Array;
    readonly mass: Float64Array;
    readonly steps: number;
    readonly times: Float64Array;
    readonly values: Float64Array;
    readonly x: Float64Array;
}

/**
 * Returns `[Φl, Φr, Φl corrected, Φr corrected, α, margin before, margin after]`.
 */
export function entropyStep(u_left: number, u_right: number): Float64Array;

export function runCase(_case: string, scheme: string, nx: number, cfl: number | null | undefined, detector: boolean): RunResult;

/**
 * Returns `[Φ0, Φ1, Φ2, f01, f12, f20 (recovered), f01, f12, f20 (Rusanov), circulation, spread]`.
 */
export function triangleFluxes(vertices: Float64Array, states: Float64Array, model: string): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_runresult_free: (a: number, b: number) => void;
    readonly entropyStep: (a: number, b: number) => [number, number, number, number];
    readonly runCase: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly runresult_component: (a: number) => [number, number];
    readonly runresult_entropy: (a: number) => [number, number];
    readonly runresult_exact: (a: number) => [number, number];
    readonly runresult_mass: (a: number) => [number, number];
    readonly runresult_steps: (a: number) => number;
    readonly runresult_times: (a: number) => [number, number];
    readonly runresult_values: (a: number) => [number, number];
    readonly runresult_x: (a: number) => [number, number];
    readonly triangleFluxes: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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

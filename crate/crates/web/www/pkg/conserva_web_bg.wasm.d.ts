/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_runresult_free: (a: number, b: number) => void;
export const entropyStep: (a: number, b: number) => [number, number, number, number];
export const runCase: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const runresult_component: (a: number) => [number, number];
export const runresult_entropy: (a: number) => [number, number];
export const runresult_exact: (a: number) => [number, number];
export const runresult_mass: (a: number) => [number, number];
export const runresult_steps: (a: number) => number;
export const runresult_times: (a: number) => [number, number];
export const runresult_values: (a: number) => [number, number];
export const runresult_x: (a: number) => [number, number];
export const triangleFluxes: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

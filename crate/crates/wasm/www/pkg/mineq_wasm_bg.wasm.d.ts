/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const br_asymmetry_bifurcation: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const breakeven_delta_frac: (a: number, b: number) => [number, number, number];
export const ga_bifurcation: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const griefing_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const normalized_rates: (a: number, b: number) => [number, number];
export const pr_equilibrium_shares: (a: number, b: number, c: number) => [number, number, number, number];
export const pr_share_trace: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;

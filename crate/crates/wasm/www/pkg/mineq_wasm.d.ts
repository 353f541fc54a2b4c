/* tslint:disable */
/* eslint-disable */

/**
 * Best-response attractor scan over the cost asymmetry of one representative
 * miner against `n - 1` unit-cost rivals. Returns `(ratio, aggregate)` pairs.
 */
export function br_asymmetry_bifurcation(n: number, ratio_min: number, ratio_max: number, grid_points: number, samples: number, burn_in: number): Float64Array;

/**
 * Break-even deviation of miner 0 as a fraction of the equilibrium
 * aggregate, for marking on the griefing curve.
 */
export function breakeven_delta_frac(n: number, cost: number): number;

/**
 * Gradient-ascent attractor scan over the learning rate for `n` equal-cost
 * miners. Returns `(theta, aggregate)` pairs, flattened.
 */
export function ga_bifurcation(n: number, theta_min: number, theta_max: number, grid_points: number, samples: number, burn_in: number): Float64Array;

/**
 * Griefing factors of upward deviations from the Nash allocation of an
 * equal-cost contest. Returns `(delta, gf)` pairs over a grid of deviation
 * sizes expressed as fractions of the equilibrium aggregate.
 */
export function griefing_curve(n: number, cost: number, delta_min_frac: number, delta_max_frac: number, points: number): Float64Array;

/**
 * Normalized profitability of the given per-chain rates (the share targets
 * of a square-root-utility miner).
 */
export function normalized_rates(rates: Float64Array): Float64Array;

/**
 * Final equilibrium shares for the rate explorer, solved to tolerance
 * rather than a fixed iteration count.
 */
export function pr_equilibrium_shares(rates: Float64Array, rho: number): Float64Array;

/**
 * Proportional-response share trajectory of one miner with budget 1 against
 * fixed per-chain rates. Returns `iterations + 1` rows of `rates.len()`
 * spending shares, flattened row-major (row 0 is the uniform start).
 */
export function pr_share_trace(rates: Float64Array, rho: number, iterations: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly br_asymmetry_bifurcation: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly breakeven_delta_frac: (a: number, b: number) => [number, number, number];
    readonly ga_bifurcation: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly griefing_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly normalized_rates: (a: number, b: number) => [number, number];
    readonly pr_equilibrium_shares: (a: number, b: number, c: number) => [number, number, number, number];
    readonly pr_share_trace: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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

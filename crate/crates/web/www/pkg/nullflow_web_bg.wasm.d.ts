/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const constantCase: (a: number) => [number, number];
export const constantCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const stationaryCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const tauCurve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_export_0: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

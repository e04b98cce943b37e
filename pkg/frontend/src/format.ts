/** Every rendered number is the API value shown to exactly 3 decimals. */

export function fmt3(value: number): string {
  return value.toFixed(3);
}

export function fmtMeanStd(mean: number, std: number): string {
  return `${fmt3(mean)} ± ${fmt3(std)}`;
}

import type { Favored, ScaleCell } from "./types.js";

/**
 * The nine-cell bipolar grading row, leftmost to rightmost.
 *
 * Mirrors the service's scale table: positions 0..3 favor the left stimulus
 * with decreasing strength, position 4 means no preference, positions 5..8
 * favor the right stimulus with increasing strength. Each cell maps to
 * exactly one (intensity, favored) grade and vice versa.
 */
export const SCALE_CELLS: readonly ScaleCell[] = [
  { position: 0, intensity: 9, favored: "left" },
  { position: 1, intensity: 7, favored: "left" },
  { position: 2, intensity: 5, favored: "left" },
  { position: 3, intensity: 3, favored: "left" },
  { position: 4, intensity: 1, favored: "none" },
  { position: 5, intensity: 3, favored: "right" },
  { position: 6, intensity: 5, favored: "right" },
  { position: 7, intensity: 7, favored: "right" },
  { position: 8, intensity: 9, favored: "right" },
];

const ANCHORS = ["Extremely", "Very strongly", "Strongly", "Moderately"];

/** Verbal anchor shown under a cell. */
export function cellLabel(position: number): string {
  if (position === 4) return "No preference";
  const side = position < 4 ? "left" : "right";
  const rank = position < 4 ? position : 8 - position;
  return `${ANCHORS[rank]} (${side})`;
}

export function gradeForCell(position: number): { intensity: number; favored: Favored } {
  const cell = SCALE_CELLS[position];
  if (!cell) throw new RangeError(`no scale cell at position ${position}`);
  return { intensity: cell.intensity, favored: cell.favored };
}

export function cellForGrade(intensity: number, favored: Favored): number {
  const cell = SCALE_CELLS.find((c) => c.intensity === intensity && c.favored === favored);
  if (!cell) throw new RangeError(`no scale cell for intensity ${intensity} favoring ${favored}`);
  return cell.position;
}

/** Check a server-sent scale table matches the built-in one cell by cell. */
export function scaleMatches(server: ScaleCell[]): boolean {
  return (
    server.length === SCALE_CELLS.length &&
    server.every(
      (c, i) =>
        c.position === i &&
        c.intensity === SCALE_CELLS[i]!.intensity &&
        c.favored === SCALE_CELLS[i]!.favored,
    )
  );
}

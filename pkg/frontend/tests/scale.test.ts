import { describe, expect, it } from "vitest";

import { SCALE_CELLS, cellForGrade, cellLabel, gradeForCell, scaleMatches } from "../src/scale.js";

describe("bipolar scale", () => {
  it("has nine cells with the indifference cell in the center", () => {
    expect(SCALE_CELLS).toHaveLength(9);
    expect(gradeForCell(4)).toEqual({ intensity: 1, favored: "none" });
  });

  it("maps cells to grades bijectively", () => {
    const seen = new Set<string>();
    for (let position = 0; position < 9; position++) {
      const grade = gradeForCell(position);
      const key = `${grade.intensity}:${grade.favored}`;
      expect(seen.has(key)).toBe(false);
      seen.add(key);
      expect(cellForGrade(grade.intensity, grade.favored)).toBe(position);
    }
    expect(seen.size).toBe(9);
  });

  it("ends with extreme preference on both sides", () => {
    expect(gradeForCell(0)).toEqual({ intensity: 9, favored: "left" });
    expect(gradeForCell(8)).toEqual({ intensity: 9, favored: "right" });
    expect(cellLabel(0)).toContain("Extremely");
    expect(cellLabel(4)).toBe("No preference");
  });

  it("rejects unknown cells and grades", () => {
    expect(() => gradeForCell(9)).toThrow(RangeError);
    expect(() => cellForGrade(2, "left")).toThrow(RangeError);
    expect(() => cellForGrade(1, "left")).toThrow(RangeError);
  });

  it("accepts a matching server scale and rejects a shuffled one", () => {
    expect(scaleMatches([...SCALE_CELLS])).toBe(true);
    const shuffled = [...SCALE_CELLS].reverse();
    expect(scaleMatches(shuffled)).toBe(false);
  });
});

import { describe, expect, it } from "vitest";

import { toPolyline } from "../src/curve.js";

describe("curve geometry", () => {
  it("renders a single point as one marker at full height scale", () => {
    const pts = toPolyline([[50, 1.0]], 100, 100, 10);
    expect(pts).toHaveLength(1);
    expect(pts[0].y).toBeCloseTo(10); // accuracy 1.0 -> top pad
  });

  it("is empty for an empty curve", () => {
    expect(toPolyline([], 100, 100)).toEqual([]);
  });

  it("keeps x monotone for increasing labeled counts", () => {
    const pts = toPolyline(
      [
        [10, 0.5],
        [20, 0.6],
        [30, 0.9],
      ],
      200,
      100,
    );
    expect(pts[0].x).toBeLessThan(pts[1].x);
    expect(pts[1].x).toBeLessThan(pts[2].x);
  });

  it("pins accuracy 0 and 1 to the padded extremes", () => {
    const pts = toPolyline(
      [
        [0, 0.0],
        [10, 1.0],
      ],
      100,
      100,
      5,
    );
    expect(pts[0].y).toBeCloseTo(95);
    expect(pts[1].y).toBeCloseTo(5);
  });

  it("appending a point leaves earlier geometry unchanged", () => {
    const before = toPolyline([[10, 0.5], [20, 0.6]], 100, 100);
    const after = toPolyline([[10, 0.5], [20, 0.6], [20, 0.7]], 100, 100);
    expect(after[0]).toEqual(before[0]);
  });
});

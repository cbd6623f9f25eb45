import { describe, expect, it } from "vitest";

import { mulberry32, gaussian } from "../src/rng.js";
import { regularizedIncompleteBeta, studentTCdf, welchMatrix, welchTTest }
  from "../src/welch.js";

describe("student t machinery", () => {
  it("incomplete beta hits known values", () => {
    // I_x(1, 1) = x; I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
    expect(regularizedIncompleteBeta(0.3, 1, 1)).toBeCloseTo(0.3, 10);
    expect(regularizedIncompleteBeta(0.7, 0.5, 0.5)).toBeCloseTo(
      (2 / Math.PI) * Math.asin(Math.sqrt(0.7)), 10);
  });

  it("t cdf matches known quantiles", () => {
    // df=1 is Cauchy: P(T <= 1) = 3/4
    expect(studentTCdf(1, 1)).toBeCloseTo(0.75, 8);
    // symmetry
    expect(studentTCdf(-1.3, 7) + studentTCdf(1.3, 7)).toBeCloseTo(1, 10);
    // large-df approaches the normal CDF
    expect(studentTCdf(1.96, 100000)).toBeCloseTo(0.975, 3);
  });
});

describe("welch tests", () => {
  it("identical samples are not significant", () => {
    const a = [0.5, 0.6, 0.7, 0.55, 0.65];
    const r = welchTTest(a, a.slice());
    expect(r.t).toBeCloseTo(0, 12);
    expect(r.pGreater).toBeCloseTo(0.5, 6);
  });

  it("separated samples are significant", () => {
    const ones = [1.0, 1.001, 0.999, 1.0, 1.0002, 0.9999];
    const zeros = [0.0, 0.001, -0.001, 0.0, 0.0002, -0.0002];
    const r = welchTTest(ones, zeros);
    expect(r.pGreater).toBeLessThan(1e-6);
  });

  it("matches an independent oracle on overlapping gaussians", () => {
    // Oracle values frozen from scipy.stats.ttest_ind(a, b,
    // equal_var=False, alternative="greater") on these exact samples.
    const a = [1.2, 0.8, 1.1, 1.4, 0.7, 1.0, 1.3, 0.9, 1.05, 1.15];
    const b = [0.9, 0.7, 1.0, 0.6, 0.85, 0.95, 0.75, 1.1, 0.8, 0.9];
    const r = welchTTest(a, b);
    expect(r.t).toBeCloseTo(2.457543683860745, 9);
    expect(r.df).toBeCloseTo(15.831909938867625, 9);
    expect(r.pGreater).toBeCloseTo(0.012958658767340005, 9);
  });

  it("identical sample sets land on dash", () => {
    const a = [0.5, 0.62, 0.58, 0.61, 0.55];
    const m = welchMatrix(new Map([["x", a], ["y", a.slice()]]));
    expect(m.get("x")).toEqual(["-", "-"]);
    expect(m.get("y")).toEqual(["-", "-"]);
  });

  it("matrix is antisymmetric with dash diagonal", () => {
    const rng = mulberry32(7);
    const samples = new Map<string, number[]>();
    const offsets: Record<string, number> = { a: 0.0, b: 0.02, c: 0.4 };
    for (const name of Object.keys(offsets)) {
      samples.set(name, Array.from({ length: 30 },
                                   () => offsets[name] + 0.05 * gaussian(rng)));
    }
    const m = welchMatrix(samples);
    const names = [...m.keys()];
    names.forEach((row, i) => {
      expect(m.get(row)![i]).toBe("-");
      names.forEach((col, j) => {
        if (i === j) return;
        const ij = m.get(row)![j];
        const ji = m.get(col)![i];
        if (ij === "1") expect(ji).toBe("0");
        if (ij === "0") expect(ji).toBe("1");
        if (ij === "-") expect(ji).toBe("-");
      });
    });
    // c clearly beats both
    const cRow = m.get("c")!;
    expect(cRow.filter((v) => v === "1").length).toBe(2);
  });
});

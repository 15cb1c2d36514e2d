import { mkdtempSync, writeFileSync, existsSync, readFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { EmptyCsvError, MissingInputError, readCsv, requireColumns } from "../src/csv.js";
import {
  checkInputsExist,
  fitLinePoints,
  fixedVsAdaptiveOption,
  nbarOption,
  readFitTable,
  sigmaSweepOption,
} from "../src/figures.js";
import { renderToSvgFile } from "../src/render.js";
import { main } from "../src/cli.js";

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "quincunx-fig-"));
}

function writeNbar(dir: string, name = "nbar.csv"): string {
  const path = join(dir, name);
  writeFileSync(path, [
    "step,time_us,nbar,delta_n",
    "0,0,9,3",
    "1,0.06,8.3,2.9",
    "2,0.12,8.1,2.95",
    "3,0.18,7.9,2.9",
  ].join("\n"));
  return path;
}

function writeSweep(dir: string): { sweepDir: string; table: string } {
  const sweepDir = join(dir, "sweep");
  const rows = (scale: number) => [
    "step,time_us,sigma_h,sigma_qp,nbar,delta_n,excluded",
    `0,0,${0.17 * scale},0.7,9,3,0`,
    `1,0.06,${0.25 * scale},1.0,8.9,3,0`,
    `2,0.12,${0.42 * scale},1.5,8.5,2.9,0`,
    `3,0.18,${0.64 * scale},2.0,8.2,2.9,0`,
    `4,0.24,${2.8 * scale},2.4,8.0,2.9,1`,
  ].join("\n");
  for (const [idx, kappa] of ["0", "0.1"].entries()) {
    const kdir = join(sweepDir, `kappa_${kappa}`);
    mkdirSync(kdir, { recursive: true });
    writeFileSync(join(kdir, "series.csv"), rows(1 + 0.1 * idx));
  }
  const table = join(sweepDir, "table1.csv");
  writeFileSync(table, [
    "kappa_over_2pi_MHz,s,ds,ln_sigma0,d_ln_sigma0,r",
    "0,0.92,0.01,0.44,0.01,0.99",
    "0.1,0.82,0.02,0.28,0.01,0.99",
  ].join("\n"));
  return { sweepDir, table };
}

describe("csv", () => {
  it("reads numeric columns", () => {
    const dir = tempDir();
    const path = writeNbar(dir);
    const table = readCsv(path);
    expect(table.nbar).toEqual([9, 8.3, 8.1, 7.9]);
    requireColumns(table, ["step", "time_us"], path);
  });

  it("raises on missing and empty inputs", () => {
    const dir = tempDir();
    expect(() => readCsv(join(dir, "nope.csv"))).toThrow(MissingInputError);
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    expect(() => readCsv(empty)).toThrow(EmptyCsvError);
    const headerOnly = join(dir, "h.csv");
    writeFileSync(headerOnly, "a,b\n");
    expect(() => readCsv(headerOnly)).toThrow(EmptyCsvError);
  });

  it("flags missing columns", () => {
    const dir = tempDir();
    const path = writeNbar(dir);
    expect(() => requireColumns(readCsv(path), ["sigma_h"], path)).toThrow(
      MissingInputError,
    );
  });
});

describe("nbar figure", () => {
  it("builds one series per input with boundary markers", () => {
    const dir = tempDir();
    const a = writeNbar(dir, "a.csv");
    const b = writeNbar(dir, "b.csv");
    const option = nbarOption([a, b], 0.06);
    const series = option.series as any[];
    expect(series).toHaveLength(2);
    expect(series[0].data).toHaveLength(4);
    expect(series[0].markLine.data.length).toBeGreaterThanOrEqual(3);
    expect((option.legend as any).show).toBe(true);
  });

  it("errors without inputs", () => {
    expect(() => nbarOption([])).toThrow(MissingInputError);
  });
});

describe("sigma sweep figure", () => {
  it("draws stored fit lines without recomputation", () => {
    const dir = tempDir();
    const { sweepDir, table } = writeSweep(dir);
    const option = sigmaSweepOption(
      [
        { label: "k=0", seriesPath: join(sweepDir, "kappa_0", "series.csv"), column: "sigma_h" },
        { label: "k=0.1", seriesPath: join(sweepDir, "kappa_0.1", "series.csv"), column: "sigma_h" },
      ],
      table,
    );
    const series = option.series as any[];
    // per input: kept scatter, hollow saturated scatter, fit line
    expect(series).toHaveLength(6);
    const fit = series.find((s) => s.name === "k=0 fit");
    expect(fit.type).toBe("line");
    // exact coefficients from the table: sigma = exp(0.44) * t^0.92
    for (const [t, v] of fit.data as [number, number][]) {
      expect(v).toBeCloseTo(Math.exp(0.44 + 0.92 * Math.log(t)), 12);
    }
    // saturated point is hollow and not under the fit line's abscissas
    const hollow = series.find((s) => s.name === "k=0 (saturated)");
    expect(hollow.data).toHaveLength(1);
    expect(fit.data.map((p: number[]) => p[0])).not.toContain(hollow.data[0][0]);
  });

  it("hides the legend for a single series", () => {
    const dir = tempDir();
    const { sweepDir, table } = writeSweep(dir);
    const option = sigmaSweepOption(
      [{ label: "k=0", seriesPath: join(sweepDir, "kappa_0", "series.csv"), column: "sigma_h" }],
      table,
    );
    expect((option.legend as any).show).toBe(false);
  });
});

describe("fixed vs adaptive figure", () => {
  function writeComparison(dir: string) {
    const adaptive = join(dir, "adaptive.csv");
    const fixed = join(dir, "fixed.csv");
    const reference = join(dir, "reference.csv");
    const body = (slope: number) =>
      ["step,sigma_h", ...[1, 2, 3, 4, 5].map((n) => `${n},${0.2 * n ** slope}`)].join("\n");
    writeFileSync(adaptive, body(1.0));
    writeFileSync(fixed, body(0.8));
    writeFileSync(reference, ["step,sigma_holevo",
      ...[1, 2, 3, 4, 5].map((n) => `${n},${0.2 * n ** 0.5}`)].join("\n"));
    const slopes = join(dir, "local_slopes.csv");
    writeFileSync(slopes, [
      "step,local_slope,breakdown",
      "1,nan,0", "2,nan,0", "3,nan,0", "4,0.9,0", "5,0.4,1",
    ].join("\n"));
    return { adaptive, fixed, reference, slopes };
  }

  it("plots three series with a breakdown marker", () => {
    const dir = tempDir();
    const { adaptive, fixed, reference, slopes } = writeComparison(dir);
    const { option, warnings } = fixedVsAdaptiveOption(
      [
        { label: "adaptive", seriesPath: adaptive, column: "sigma_h" },
        { label: "fixed", seriesPath: fixed, column: "sigma_h" },
        { label: "random walk", seriesPath: reference, column: "sigma_holevo" },
      ],
      slopes,
    );
    expect(warnings).toHaveLength(0);
    const series = option.series as any[];
    expect(series).toHaveLength(3);
    expect(series[0].markLine.data[0].xAxis).toBe(5);
  });

  it("warns and continues when the reference series is missing", () => {
    const dir = tempDir();
    const { adaptive, fixed } = writeComparison(dir);
    const { option, warnings } = fixedVsAdaptiveOption([
      { label: "adaptive", seriesPath: adaptive, column: "sigma_h" },
      { label: "fixed", seriesPath: fixed, column: "sigma_h" },
      { label: "random walk", seriesPath: join(dir, "missing.csv"),
        column: "sigma_holevo", optional: true },
    ]);
    expect(warnings).toHaveLength(1);
    expect(option.series as any[]).toHaveLength(2);
  });

  it("fails when nothing can be plotted", () => {
    const dir = tempDir();
    expect(() =>
      fixedVsAdaptiveOption([
        { label: "a", seriesPath: join(dir, "missing.csv"), column: "sigma_h",
          optional: true },
      ]),
    ).toThrow(MissingInputError);
  });
});

describe("figure spec validation", () => {
  it("checks all referenced inputs exist", () => {
    const dir = tempDir();
    const nbar = writeNbar(dir);
    checkInputsExist({ inputs: [nbar], output: join(dir, "x.svg") });
    expect(() =>
      checkInputsExist({ inputs: [nbar, join(dir, "gone.csv")], output: "" }),
    ).toThrow(MissingInputError);
  });
});

describe("rendering and CLI", () => {
  it("writes an SVG for the photon trace", () => {
    const dir = tempDir();
    const nbar = writeNbar(dir);
    const out = join(dir, "fig2.svg");
    const svg = renderToSvgFile(nbarOption([nbar], 0.06), out);
    expect(existsSync(out)).toBe(true);
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("drives the sweep figure end to end", () => {
    const dir = tempDir();
    const { sweepDir, table } = writeSweep(dir);
    const out = join(dir, "fig3.svg");
    const code = main([
      "sigma-sweep", "--sweep-dir", sweepDir, "--column", "sigma_h",
      "--table", table, "--output", out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("returns 2 for unknown commands and 1 for missing inputs", () => {
    expect(main(["nonsense"])).toBe(2);
    expect(main(["nbar", "--input", "/nonexistent.csv", "--output", "/tmp/x.svg"])).toBe(1);
  });
});

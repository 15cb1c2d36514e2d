/** Secondary acceptance: regenerate the three figure analogs from a full
 * sweep-artifact set without error, with fit lines drawn from the analysis
 * CSV coefficients exactly (no recomputation). */

import { existsSync, mkdirSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readFitTable, fitLinePoints, sigmaSweepOption } from "../src/figures.js";
import { main } from "../src/cli.js";

function buildArtifacts(root: string) {
  // nbar trace
  const nbar = join(root, "nbar.csv");
  writeFileSync(nbar, ["step,time_us,nbar,delta_n",
    ...Array.from({ length: 16 }, (_, j) =>
      `${j},${(0.0598 * j).toFixed(4)},${(9 - 0.1 * j).toFixed(3)},3.0`),
  ].join("\n"));

  // sweep with three decay rates
  const kappas = ["0", "0.1", "0.5"];
  const fits = [
    { s: 0.92, b: 0.44 },
    { s: 0.82, b: 0.28 },
    { s: 0.45, b: -0.31 },
  ];
  const sweepDir = join(root, "sweep");
  kappas.forEach((kappa, idx) => {
    const dir = join(sweepDir, `kappa_${kappa}`);
    mkdirSync(dir, { recursive: true });
    const lines = ["step,time_us,sigma_h,sigma_qp,nbar,delta_n,excluded"];
    for (let j = 0; j <= 15; j++) {
      const t = 0.0598 * j;
      const sigma = j === 0 ? 0.17
        : Math.exp(fits[idx].b + fits[idx].s * Math.log(t));
      const excluded = sigma >= 2.5 ? 1 : 0;
      lines.push(`${j},${t},${sigma},${sigma / 2},9,3,${excluded}`);
    }
    writeFileSync(join(dir, "series.csv"), lines.join("\n"));
  });
  const table = join(sweepDir, "table1.csv");
  writeFileSync(table, ["kappa_over_2pi_MHz,s,ds,ln_sigma0,d_ln_sigma0,r",
    ...kappas.map((k, i) => `${k},${fits[i].s},0.01,${fits[i].b},0.01,0.99`),
  ].join("\n"));

  // fixed / adaptive / reference series plus local slopes
  const mk = (name: string, slope: number, col = "sigma_h") => {
    const path = join(root, name);
    writeFileSync(path, [`step,${col}`,
      ...Array.from({ length: 15 }, (_, i) =>
        `${i + 1},${0.2 * (i + 1) ** slope}`),
    ].join("\n"));
    return path;
  };
  const adaptive = mk("adaptive.csv", 1.0);
  const fixed = mk("fixed.csv", 0.85);
  const reference = mk("reference.csv", 0.5, "sigma_holevo");
  const slopes = join(root, "local_slopes.csv");
  writeFileSync(slopes, ["step,local_slope,breakdown",
    ...Array.from({ length: 15 }, (_, i) =>
      `${i + 1},${i < 9 ? 0.9 : 0.5},${i + 1 === 11 ? 1 : 0}`),
  ].join("\n"));
  return { nbar, sweepDir, table, adaptive, fixed, reference, slopes };
}

describe("figure regeneration from sweep artifacts", () => {
  it("produces all three figures and exact fit lines", () => {
    const root = mkdtempSync(join(tmpdir(), "quincunx-accept-"));
    const art = buildArtifacts(root);

    const fig2 = join(root, "fig2.svg");
    expect(main(["nbar", "--input", art.nbar, "--period", "0.0598",
                 "--output", fig2])).toBe(0);
    expect(existsSync(fig2)).toBe(true);

    const fig3 = join(root, "fig3a.svg");
    expect(main(["sigma-sweep", "--sweep-dir", art.sweepDir,
                 "--column", "sigma_h", "--table", art.table,
                 "--output", fig3])).toBe(0);
    expect(existsSync(fig3)).toBe(true);

    const fig4 = join(root, "fig4a.svg");
    expect(main(["fixed-vs-adaptive",
                 "--series", `adaptive=${art.adaptive}:sigma_h`,
                 "--series", `fixed=${art.fixed}:sigma_h`,
                 "--optional-series", `random walk=${art.reference}:sigma_holevo`,
                 "--local-slopes", art.slopes,
                 "--output", fig4])).toBe(0);
    expect(existsSync(fig4)).toBe(true);

    // fit lines equal the stored coefficients exactly on every abscissa
    const fits = readFitTable(art.table);
    const option = sigmaSweepOption(
      ["0", "0.1", "0.5"].map((kappa) => ({
        label: `kappa ${kappa}`,
        seriesPath: join(art.sweepDir, `kappa_${kappa}`, "series.csv"),
        column: "sigma_h",
      })),
      art.table,
    );
    const series = option.series as any[];
    fits.forEach((fit, idx) => {
      const line = series.find((s) => s.name === `kappa ${["0", "0.1", "0.5"][idx]} fit`);
      const times = line.data.map((p: number[]) => p[0]);
      expect(line.data).toEqual(fitLinePoints(fit, times));
    });
  });
});

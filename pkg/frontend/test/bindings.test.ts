import { spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
    BoundResult,
    InvalidInputError,
    NotIdentifiableError,
    createGraph,
    identify,
    toLatex,
    verifyAgainstModel,
} from "../src/index.js";

const BIN = process.env.CAUSALID_BIN ?? "causalid";

function cliLatex(graph: string, effect: string, doSet: string, cond?: string): string {
    const args = ["identify", "--graph", graph, "--effect", effect, "--format", "latex"];
    if (doSet) args.push("--do", doSet);
    if (cond) args.push("--cond", cond);
    const r = spawnSync(BIN, args, { encoding: "utf-8" });
    if (r.status !== 0) throw new Error(`cli failed: ${r.stderr}`);
    return r.stdout;
}

interface GoldenCase {
    name: string;
    edges: string[];
    effect: string[];
    do: string[];
    cond?: string[];
}

const GOLDENS: GoldenCase[] = [
    { name: "front door", edges: ["X->Z", "Z->Y", "X<->Y"], effect: ["Y"], do: ["X"] },
    { name: "back door", edges: ["Z->X", "Z->Y", "X->Y"], effect: ["Y"], do: ["X"] },
    { name: "plain chain", edges: ["A->B", "B->C"], effect: ["C"], do: ["A"] },
    { name: "fork", edges: ["A->B", "A->C"], effect: ["B", "C"], do: ["A"] },
    {
        name: "conditional example, unconditional query",
        edges: ["W->X", "W->Z", "X->Z", "Z->Y", "X<->Y"],
        effect: ["Y"],
        do: ["X"],
    },
    {
        name: "conditional example, conditional query",
        edges: ["W->X", "W->Z", "X->Z", "Z->Y", "X<->Y"],
        effect: ["Y"],
        do: ["X"],
        cond: ["Z"],
    },
    {
        name: "two outcomes with confounding",
        edges: ["W->X", "X->Y1", "Z->Y2", "W<->Y1", "W<->Z", "Z<->Y2", "X<->Z"],
        effect: ["Y1", "Y2"],
        do: ["X"],
    },
    { name: "no interventions", edges: ["X->Y"], effect: ["X", "Y"], do: [] },
];

describe("latex parity with the CLI", () => {
    for (const g of GOLDENS) {
        it(g.name, () => {
            const graph = createGraph(g.edges);
            const result = identify(graph, { effect: g.effect, do: g.do, cond: g.cond });
            const viaCli = cliLatex(
                g.edges.join(","),
                g.effect.join(","),
                g.do.join(","),
                g.cond?.join(","),
            );
            expect(result.latex + "\n").toBe(viaCli);
            expect(toLatex(result)).toBe(result.latex);
        });
    }
});

describe("expressions", () => {
    it("returns the serialised tree", () => {
        const graph = createGraph(["X->Z", "Z->Y", "X<->Y"]);
        const result = identify(graph, { effect: ["Y"], do: ["X"] });
        expect(result).toBeInstanceOf(BoundResult);
        expect(result.expression.kind).toBe("marginal");
        expect(result.latex).toBe("\\sum_{z}P(z|x)\\sum_{x}P(x)P(y|x, z)");
    });
});

describe("errors", () => {
    it("raises NotIdentifiableError naming both forests", () => {
        const graph = createGraph(["X->Y", "X<->Y"]);
        try {
            identify(graph, { effect: ["Y"], do: ["X"] });
            expect.unreachable("bow arc must not be identifiable");
        } catch (err) {
            expect(err).toBeInstanceOf(NotIdentifiableError);
            const hedge = err as NotIdentifiableError;
            expect(hedge.forestVertices).toEqual(["X", "Y"]);
            expect(hedge.subforestVertices).toEqual(["Y"]);
            expect(hedge.message).toContain("X, Y");
            expect(hedge.message).toContain("[Y]");
        }
    });

    it("rejects an empty effect set locally", () => {
        const graph = createGraph(["X->Y"]);
        expect(() => identify(graph, { effect: [] })).toThrow(InvalidInputError);
    });

    it("rejects malformed edges", () => {
        expect(() => createGraph(["X=>Y"])).toThrow(InvalidInputError);
        expect(() => createGraph([])).toThrow(InvalidInputError);
    });

    it("rejects overlapping sets via the CLI", () => {
        const graph = createGraph(["X->Y"]);
        expect(() => identify(graph, { effect: ["Y"], do: ["Y"] })).toThrow(
            InvalidInputError,
        );
    });
});

describe("graph export", () => {
    it("renders DOT with a dashed confounding edge", () => {
        const dot = createGraph(["X->Y", "X<->Y"]).toDot();
        expect(dot).toContain("X -> Y;");
        expect(dot).toContain("dir=both, style=dashed");
    });
});

describe("model verification", () => {
    it("verifies a chain model end to end", () => {
        const dir = mkdtempSync(join(tmpdir(), "causalid-"));
        const path = join(dir, "chain.json");
        writeFileSync(path, JSON.stringify({
            observed: [{ name: "A", domain: 2 }, { name: "B", domain: 2 }],
            latents: [],
            parents: { B: ["A"] },
            cpts: {
                A: { "": [0.25, 0.75] },
                B: { "0": [0.9, 0.1], "1": [0.2, 0.8] },
            },
        }));
        const report = verifyAgainstModel(path, { effect: ["B"], do: ["A"] });
        expect(report.withinTolerance).toBe(true);
        expect(report.maxDeviation).toBeLessThan(1e-9);
        expect(report.latex).toBe("P(b|a)");
    });

    it("propagates non-identifiability", () => {
        const dir = mkdtempSync(join(tmpdir(), "causalid-"));
        const path = join(dir, "bow.json");
        writeFileSync(path, JSON.stringify({
            observed: [{ name: "X", domain: 2 }, { name: "Y", domain: 2 }],
            latents: [{ name: "U[X,Y]", domain: 2, marginal: [0.5, 0.5] }],
            parents: { X: ["U[X,Y]"], Y: ["X", "U[X,Y]"] },
            cpts: {
                X: { "0": [0.3, 0.7], "1": [0.6, 0.4] },
                Y: { "0,0": [0.2, 0.8], "0,1": [0.5, 0.5], "1,0": [0.7, 0.3], "1,1": [0.1, 0.9] },
            },
        }));
        expect(() => verifyAgainstModel(path, { effect: ["Y"], do: ["X"] })).toThrow(
            NotIdentifiableError,
        );
    });
});

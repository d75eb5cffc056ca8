/**
 * Node bindings for the `causalid` command-line tool.
 *
 * The bindings never reimplement the algorithms: every call shells out to
 * the CLI and talks to it through its stable surfaces (the graph text
 * format, the versioned `ast` JSON report, and the exit-code contract).
 * Set `CAUSALID_BIN` to point at the executable if it is not on PATH.
 */

import { spawnSync } from "node:child_process";

/** Serialised probability expression, mirroring the CLI's `ast` format. */
export type ExpressionNode =
    | { kind: "atom"; var: string[]; cond: string[] }
    | { kind: "product"; children: ExpressionNode[] }
    | { kind: "marginal"; sumset: string[]; body: ExpressionNode }
    | { kind: "quotient"; num: ExpressionNode; den: ExpressionNode };

interface HedgeReport {
    forest: { vertices: string[] };
    subforest: { vertices: string[] };
    sub_x: string[];
    sub_y: string[];
    description: string;
}

/** A malformed graph or query, mapped from the CLI's usage exit code. */
export class InvalidInputError extends Error {}

/** The effect has no do-free expression; carries both hedge forests. */
export class NotIdentifiableError extends Error {
    readonly forestVertices: string[] = [];
    readonly subforestVertices: string[] = [];
    readonly subX: string[] = [];
    readonly subY: string[] = [];

    static fromHedge(hedge: HedgeReport): NotIdentifiableError {
        const err = new NotIdentifiableError(
            `not identifiable: hedge with forests ` +
            `[${hedge.forest.vertices.join(", ")}] and ` +
            `[${hedge.subforest.vertices.join(", ")}] ` +
            `for the sub-query on [${hedge.sub_y.join(", ")}] ` +
            `under interventions [${hedge.sub_x.join(", ")}]`,
        );
        Object.assign(err, {
            forestVertices: hedge.forest.vertices,
            subforestVertices: hedge.subforest.vertices,
            subX: hedge.sub_x,
            subY: hedge.sub_y,
        });
        return err;
    }
}

function runCli(args: string[], input?: string) {
    const bin = process.env.CAUSALID_BIN ?? "causalid";
    const result = spawnSync(bin, args, { input, encoding: "utf-8" });
    if (result.error) {
        throw new Error(`failed to launch ${bin}: ${result.error.message}`);
    }
    return result;
}

/** An opaque, validated handle around a causal diagram. */
export class BoundGraph {
    /** @internal */
    readonly edges: string[];

    /** @internal */
    constructor(edges: string[]) {
        this.edges = edges;
    }

    get inlineSpec(): string {
        return this.edges.join(",");
    }

    /** Deterministic DOT rendering, straight from the CLI. */
    toDot(): string {
        const r = runCli(["export-dot", "--graph", this.inlineSpec]);
        if (r.status !== 0) {
            throw new InvalidInputError(r.stderr.trim());
        }
        return r.stdout;
    }
}

/** The result of one identification run. */
export class BoundResult {
    readonly latex: string;
    readonly expression: ExpressionNode;

    /** @internal */
    constructor(latex: string, expression: ExpressionNode) {
        this.latex = latex;
        this.expression = expression;
    }

    toLatex(): string {
        return this.latex;
    }
}

/**
 * Build a graph from edge strings such as `"X->Y"` and `"X<->Y"`.
 * Throws {@link InvalidInputError} when an edge cannot be parsed.
 */
export function createGraph(edges: string[]): BoundGraph {
    if (edges.length === 0) {
        throw new InvalidInputError("a graph needs at least one edge");
    }
    const graph = new BoundGraph([...edges]);
    graph.toDot(); // validation happens CLI-side
    return graph;
}

export interface IdentifyOptions {
    effect: string[];
    do?: string[];
    cond?: string[];
}

/**
 * Identify `P_x(y)` or `P_x(y|z)` on the graph.
 *
 * Returns the expression and its LaTeX text, byte-identical to what
 * `causalid identify --format latex` prints. Throws
 * {@link NotIdentifiableError} when the CLI reports a hedge and
 * {@link InvalidInputError} on malformed queries.
 */
export function identify(graph: BoundGraph, options: IdentifyOptions): BoundResult {
    if (!options.effect || options.effect.length === 0) {
        throw new InvalidInputError("the effect set must not be empty");
    }
    const args = [
        "identify",
        "--graph", graph.inlineSpec,
        "--effect", options.effect.join(","),
        "--format", "ast",
    ];
    for (const v of options.do ?? []) {
        args.push("--do", v);
    }
    for (const v of options.cond ?? []) {
        args.push("--cond", v);
    }
    const r = runCli(args);
    if (r.status === 1) {
        throw new InvalidInputError(r.stderr.trim());
    }
    const report = JSON.parse(r.stdout);
    if (r.status === 2) {
        throw NotIdentifiableError.fromHedge(report.hedge as HedgeReport);
    }
    if (r.status !== 0) {
        throw new Error(`unexpected exit code ${r.status}: ${r.stderr}`);
    }
    return new BoundResult(report.latex, report.expression as ExpressionNode);
}

export function toLatex(result: BoundResult): string {
    return result.toLatex();
}

export interface VerificationReport {
    latex: string;
    maxDeviation: number;
    withinTolerance: boolean;
}

/**
 * Identify an effect on the graph of a JSON model document and compare the
 * expression against the model's exact interventional distribution.
 */
export function verifyAgainstModel(
    modelPath: string,
    options: IdentifyOptions & { tolerance?: number; trials?: number },
): VerificationReport {
    const args = ["verify", modelPath, "--effect", options.effect.join(",")];
    for (const v of options.do ?? []) {
        args.push("--do", v);
    }
    for (const v of options.cond ?? []) {
        args.push("--cond", v);
    }
    if (options.tolerance !== undefined) {
        args.push("--tolerance", String(options.tolerance));
    }
    if (options.trials !== undefined) {
        args.push("--trials", String(options.trials));
    }
    const r = runCli(args);
    if (r.status === 1) {
        throw new InvalidInputError(r.stderr.trim());
    }
    if (r.status === 2) {
        throw new NotIdentifiableError(r.stdout.trim());
    }
    const lines = r.stdout.trim().split("\n");
    const devLine = lines.find((l) => l.startsWith("max deviation:"));
    const deviation = devLine ? Number(devLine.split(":")[1]) : NaN;
    return {
        latex: lines[0],
        maxDeviation: deviation,
        withinTolerance: r.status === 0,
    };
}

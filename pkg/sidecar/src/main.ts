/**
 * Entry point.
 *
 *   node dist/main.js --stdio [--model hash-v1] [--dim 512] [--batch 64]
 *   node dist/main.js --port 7077 [...]
 */

import { parseArgs } from "node:util";

import { loadEncoder } from "./encoder.js";
import { serveStdio, serveTcp } from "./server.js";

function main(): void {
  const { values } = parseArgs({
    options: {
      model: { type: "string", default: "hash-v1" },
      dim: { type: "string", default: "512" },
      batch: { type: "string", default: "64" },
      port: { type: "string" },
      stdio: { type: "boolean", default: false },
    },
  });

  const dim = Number(values.dim);
  const batch = Number(values.batch);
  if (!Number.isInteger(dim) || dim < 1) {
    console.error(`invalid --dim ${values.dim}`);
    process.exit(1);
  }
  if (!Number.isInteger(batch) || batch < 1) {
    console.error(`invalid --batch ${values.batch}`);
    process.exit(1);
  }
  if (values.port !== undefined && values.stdio) {
    console.error("choose one of --stdio or --port");
    process.exit(1);
  }

  let encoder;
  try {
    encoder = loadEncoder(values.model as string);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(1);
  }

  const config = { dim, batch };
  if (values.port !== undefined) {
    const port = Number(values.port);
    if (!Number.isInteger(port) || port < 1 || port > 65535) {
      console.error(`invalid --port ${values.port}`);
      process.exit(1);
    }
    serveTcp(encoder, config, port);
    console.error(`embedding sidecar (${encoder.name}, dim=${dim}) listening on 127.0.0.1:${port}`);
  } else {
    void serveStdio(encoder, config);
  }
}

main();

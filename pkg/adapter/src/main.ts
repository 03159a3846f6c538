/**
 * Entry point: serve the keyword demo classifier over stdio (default) or TCP
 * (`--port N`). Wrap a different model by building a Session around your own
 * scorer and reusing serveStream/serveTcp.
 */

import { keywordSession } from "./keyword";
import { serveStream, serveTcp } from "./server";

function main(): void {
  const args = process.argv.slice(2);
  const portIndex = args.indexOf("--port");
  const session = keywordSession();

  if (portIndex !== -1) {
    const port = Number(args[portIndex + 1]);
    if (!Number.isInteger(port) || port < 0) {
      process.stderr.write("usage: main.js [--port N]\n");
      process.exit(2);
    }
    const server = serveTcp(port, session);
    server.on("listening", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        process.stderr.write(`listening on ${address.port}\n`);
      }
    });
    return;
  }

  void serveStream(process.stdin, process.stdout, session).then(() =>
    process.exit(0)
  );
}

main();

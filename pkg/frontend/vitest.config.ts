import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // Plain node by default; the panel test opts into happy-dom with a
    // @vitest-environment docblock.
    environment: "node",
  },
});

import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // integration tests spawn the Python service, so allow generous startup time
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});

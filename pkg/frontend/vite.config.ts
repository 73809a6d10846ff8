/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// The engine listens on 127.0.0.1:8470 by default (ISMS_LISTEN to change).
// The dashboard talks to it through the /api prefix so the browser never
// needs CORS; dev and preview both strip the prefix before forwarding.
const API_TARGET = process.env.ISMS_API ?? "http://127.0.0.1:8470";

const proxy = {
  "/api": {
    target: API_TARGET,
    changeOrigin: true,
    rewrite: (path: string) => path.replace(/^\/api/, ""),
  },
};

export default defineConfig({
  server: { port: 4170, proxy },
  preview: { port: 4173, proxy },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});

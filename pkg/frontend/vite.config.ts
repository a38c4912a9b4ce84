import { defineConfig } from "vite";

// All API routes live under /runs; point them at a local service instance.
// Override with e.g. VITE_API_PROXY=http://host:9000 npm run dev
const apiTarget = process.env.VITE_API_PROXY ?? "http://127.0.0.1:8731";

export default defineConfig({
  server: {
    proxy: { "/runs": apiTarget },
  },
  preview: {
    proxy: { "/runs": apiTarget },
  },
});

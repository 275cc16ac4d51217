/// <reference types="vitest" />
import { defineConfig } from 'vite';

export default defineConfig({
  server: {
    proxy: {
      // dev-mode pass-through to a locally running `pathcast serve`
      '/scenarios': 'http://127.0.0.1:8000',
    },
  },
  test: {
    environment: 'node',
    include: ['tests/**/*.test.ts'],
  },
});
